// Typed client over the verification service. Every backend route the popup
// uses goes through here; concurrent calls to the same endpoint share one
// in-flight request.

const BASE_URL_KEY = 'backendBaseUrl'
export const DEFAULT_BASE_URL = 'http://127.0.0.1:8080'

export interface HeadlineResult {
  headline: string
  author?: string
}

export interface Assessment {
  checkworthy: boolean
  verdict: 0 | 1 | null
  probability: number | null
}

export interface SimilarMatch {
  claim_text: string
  original_label: string
  verdict: 0 | 1
  score: number
}

export interface SimilarPage {
  matches: SimilarMatch[]
  page: number
  page_size: number
  total_matches: number
}

export interface Tally {
  fake: number
  mixed: number
  true: number
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string
  ) {
    super(message)
  }
}

export async function getBaseUrl(): Promise<string> {
  const stored = (await chrome.storage.local.get(BASE_URL_KEY))[BASE_URL_KEY]
  if (typeof stored === 'string' && stored.trim().length > 0) {
    return stored.trim().replace(/\/+$/, '')
  }
  return DEFAULT_BASE_URL
}

export async function setBaseUrl(url: string): Promise<void> {
  await chrome.storage.local.set({ [BASE_URL_KEY]: url })
}

async function parseError(response: Response): Promise<ApiError> {
  let code = 'unknown'
  let message = `request failed with status ${response.status}`
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } }
    if (body.error?.code) code = body.error.code
    if (body.error?.message) message = body.error.message
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(response.status, code, message)
}

export class ApiClient {
  private inFlight = new Map<string, Promise<unknown>>()

  constructor(
    private readonly baseUrl: string,
    private readonly installationId: string
  ) {}

  // one request per endpoint at a time; later callers join the first
  private dedup<T>(endpoint: string, start: () => Promise<T>): Promise<T> {
    const pending = this.inFlight.get(endpoint)
    if (pending) return pending as Promise<T>
    const request = start().finally(() => this.inFlight.delete(endpoint))
    this.inFlight.set(endpoint, request)
    return request
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init)
    if (!response.ok) throw await parseError(response)
    return (await response.json()) as T
  }

  headlineDetection(pageUrl: string): Promise<HeadlineResult> {
    const query = new URLSearchParams({ url: pageUrl })
    return this.dedup('headline_detection', () =>
      this.request<HeadlineResult>(`/headline_detection?${query}`)
    )
  }

  mlClassification(headline: string): Promise<Assessment> {
    const query = new URLSearchParams({ headline })
    return this.dedup('ml_classification', () =>
      this.request<Assessment>(`/ml_classification?${query}`)
    )
  }

  similarClaims(headline: string, page: number, pageSize: number): Promise<SimilarPage> {
    const query = new URLSearchParams({
      headline,
      page: String(page),
      page_size: String(pageSize),
    })
    return this.dedup('get_similar_claims', () =>
      this.request<SimilarPage>(`/get_similar_claims?${query}`)
    )
  }

  castVote(pageUrl: string, value: 'fake' | 'true'): Promise<void> {
    return this.dedup('cast_vote', () =>
      this.request<unknown>('/votes', {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ installation_id: this.installationId, url: pageUrl, value }),
      }).then(() => undefined)
    )
  }

  revokeVote(pageUrl: string): Promise<void> {
    return this.dedup('revoke_vote', () =>
      this.request<unknown>('/votes', {
        method: 'DELETE',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ installation_id: this.installationId, url: pageUrl }),
      }).then(() => undefined)
    )
  }

  getTally(pageUrl: string): Promise<Tally> {
    const query = new URLSearchParams({ installation_id: this.installationId, url: pageUrl })
    return this.dedup('get_tally', () => this.request<Tally>(`/votes?${query}`))
  }
}

export async function createClient(installationId: string): Promise<ApiClient> {
  return new ApiClient(await getBaseUrl(), installationId)
}
