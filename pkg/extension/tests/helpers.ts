// Test doubles: an in-memory chrome.* stub and a scriptable backend behind
// a fake fetch. The backend keeps a real miniature vote model so gating
// behavior emerges from state, not from canned responses.

export interface StubCall {
  method: string
  path: string
  query: URLSearchParams
  body?: Record<string, unknown>
}

type Handler = (call: StubCall) => { status: number; body: unknown }

export class BackendStub {
  calls: StubCall[] = []
  private routes = new Map<string, Handler>()
  private gate: Promise<void> | null = null

  on(method: string, path: string, handler: Handler): void {
    this.routes.set(`${method} ${path}`, handler)
  }

  // pause every response until release() is called
  hold(): () => void {
    let release!: () => void
    this.gate = new Promise((resolve) => {
      release = resolve
    })
    return () => {
      this.gate = null
      release()
    }
  }

  install(): void {
    globalThis.fetch = (async (input: string | URL, init?: RequestInit) => {
      const url = new URL(String(input))
      const method = init?.method ?? 'GET'
      const call: StubCall = {
        method,
        path: url.pathname,
        query: url.searchParams,
        body: typeof init?.body === 'string' ? JSON.parse(init.body) : undefined,
      }
      this.calls.push(call)
      const handler = this.routes.get(`${method} ${url.pathname}`)
      if (handler === undefined) {
        throw new TypeError('fetch failed')
      }
      if (this.gate !== null) await this.gate
      const result = handler(call)
      return new Response(JSON.stringify(result.body), {
        status: result.status,
        headers: { 'content-type': 'application/json' },
      })
    }) as typeof fetch
  }

  callsTo(method: string, path: string): StubCall[] {
    return this.calls.filter((call) => call.method === method && call.path === path)
  }
}

export function installChromeStub(tabUrl?: string): Map<string, unknown> {
  const store = new Map<string, unknown>()
  const stub = {
    storage: {
      local: {
        async get(keys: string | string[]): Promise<Record<string, unknown>> {
          const wanted = Array.isArray(keys) ? keys : [keys]
          const found: Record<string, unknown> = {}
          for (const key of wanted) {
            if (store.has(key)) found[key] = store.get(key)
          }
          return found
        },
        async set(items: Record<string, unknown>): Promise<void> {
          for (const [key, value] of Object.entries(items)) store.set(key, value)
        },
      },
    },
    tabs: {
      async query(): Promise<Array<{ url?: string }>> {
        return [tabUrl === undefined ? {} : { url: tabUrl }]
      },
    },
  }
  ;(globalThis as { chrome?: unknown }).chrome = stub
  return store
}

export const HEADLINE = 'Storm shelters opened across Arden county on 3 May'

export interface ClaimBackendOptions {
  totalMatches?: number
  checkworthy?: boolean
}

// Wires a typical verification service onto the stub. Vote state is live:
// casting, revoking, and the view gate all read the same map.
export function claimBackend(stub: BackendStub, options: ClaimBackendOptions = {}) {
  const totalMatches = options.totalMatches ?? 12
  const votes = new Map<string, 'fake' | 'mixed' | 'true'>()
  const voteKey = (call: StubCall, field: 'body' | 'query'): string => {
    const installation =
      field === 'body' ? String(call.body?.installation_id) : call.query.get('installation_id')
    const url = field === 'body' ? String(call.body?.url) : call.query.get('url')
    return `${installation} ${url}`
  }
  const tallyFor = (url: string) => {
    const tally = { fake: 0, mixed: 0, true: 0 }
    for (const [key, value] of votes) {
      if (key.endsWith(` ${url}`)) tally[value] += 1
    }
    return tally
  }

  stub.on('GET', '/headline_detection', () => ({
    status: 200,
    body: { headline: HEADLINE, author: 'R. Example' },
  }))
  stub.on('GET', '/ml_classification', () =>
    options.checkworthy === false
      ? { status: 200, body: { checkworthy: false, verdict: null, probability: null } }
      : { status: 200, body: { checkworthy: true, verdict: 1, probability: 0.91 } }
  )
  stub.on('GET', '/get_similar_claims', (call) => {
    const page = Number(call.query.get('page') ?? '0')
    const pageSize = Number(call.query.get('page_size') ?? '5')
    const start = page * pageSize
    const matches = []
    for (let i = start; i < Math.min(start + pageSize, totalMatches); i++) {
      matches.push({
        claim_text: `vetted claim number ${i}`,
        original_label: 'false',
        verdict: 0,
        score: 90 - i,
      })
    }
    return {
      status: 200,
      body: { matches, page, page_size: pageSize, total_matches: totalMatches },
    }
  })
  stub.on('POST', '/votes', (call) => {
    const key = voteKey(call, 'body')
    if (votes.has(key)) {
      return { status: 409, body: { error: { code: 'already_voted', message: 'already voted' } } }
    }
    votes.set(key, call.body?.value as 'fake' | 'true')
    return { status: 201, body: { status: 'ok' } }
  })
  stub.on('DELETE', '/votes', (call) => {
    const key = voteKey(call, 'body')
    if (!votes.has(key)) {
      return { status: 404, body: { error: { code: 'not_voted', message: 'no active vote' } } }
    }
    votes.delete(key)
    return { status: 200, body: { status: 'ok' } }
  })
  stub.on('GET', '/votes', (call) => {
    const key = voteKey(call, 'query')
    if (!votes.has(key)) {
      return { status: 403, body: { error: { code: 'vote_required', message: 'vote first' } } }
    }
    return { status: 200, body: tallyFor(call.query.get('url') ?? '') }
  })

  return { votes }
}
