// Popup state machine. Everything the popup shows is derived from one
// PopupState value; the controller owns all backend traffic and the
// vote-before-view rule on the client side.

import { ApiClient, ApiError, Assessment, SimilarPage, Tally } from './api.js'
import { forgetVote, getVoteHistory, recordVote } from './identity.js'

export type Phase = 'loading' | 'no-headline' | 'ready' | 'error'

export type StoredVote = 'fake' | 'true' | 'unknown'

export type VoteState =
  | { kind: 'not-voted' }
  | { kind: 'voted'; value: 'fake' | 'true' | null }

export interface PopupState {
  phase: Phase
  pageUrl: string | null
  headline: string | null
  author: string | null
  assessment: Assessment | null
  assessmentError: string | null
  vote: VoteState
  tally: Tally | null
  similar: SimilarPage | null
  error: string | null
}

export const PAGE_SIZE = 5

export function initialState(): PopupState {
  return {
    phase: 'loading',
    pageUrl: null,
    headline: null,
    author: null,
    assessment: null,
    assessmentError: null,
    vote: { kind: 'not-voted' },
    tally: null,
    similar: null,
    error: null,
  }
}

type Listener = (state: PopupState) => void

export class PopupController {
  private state: PopupState = initialState()
  private listeners: Listener[] = []
  private votePending = false

  constructor(private readonly api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener)
    listener(this.state)
  }

  getState(): PopupState {
    return this.state
  }

  private update(changes: Partial<PopupState>): void {
    const next = { ...this.state, ...changes }
    if (next.vote.kind !== 'voted') {
      next.tally = null
    }
    this.state = next
    for (const listener of this.listeners) listener(next)
  }

  async open(pageUrl: string): Promise<void> {
    this.update({ ...initialState(), pageUrl, phase: 'loading' })
    let headline
    try {
      headline = await this.api.headlineDetection(pageUrl)
    } catch (error) {
      if (error instanceof ApiError && error.code === 'no_headline') {
        this.update({ phase: 'no-headline' })
      } else {
        this.update({ phase: 'error', error: describe(error) })
      }
      return
    }
    this.update({ headline: headline.headline, author: headline.author ?? null })

    await Promise.all([
      this.loadAssessment(headline.headline),
      this.loadSimilar(headline.headline, 0),
      this.restoreVote(pageUrl),
    ])
    this.update({ phase: 'ready' })
  }

  async retry(): Promise<void> {
    if (this.state.pageUrl !== null) await this.open(this.state.pageUrl)
  }

  private async loadAssessment(headline: string): Promise<void> {
    try {
      const assessment = await this.api.mlClassification(headline)
      this.update({ assessment, assessmentError: null })
    } catch (error) {
      this.update({ assessment: null, assessmentError: describe(error) })
    }
  }

  private async loadSimilar(headline: string, page: number): Promise<void> {
    try {
      const similar = await this.api.similarClaims(headline, page, PAGE_SIZE)
      this.update({ similar })
    } catch {
      this.update({ similar: null })
    }
  }

  // the tally is requested only when this installation's own history says a
  // vote exists; a 403 means the record was stale, so it is dropped
  private async restoreVote(pageUrl: string): Promise<void> {
    const history = await getVoteHistory()
    const stored = history[pageUrl]
    if (stored === undefined) return
    try {
      const tally = await this.api.getTally(pageUrl)
      this.update({
        vote: { kind: 'voted', value: stored === 'unknown' ? null : stored },
        tally,
      })
    } catch (error) {
      if (error instanceof ApiError && error.code === 'vote_required') {
        await forgetVote(pageUrl)
        this.update({ vote: { kind: 'not-voted' } })
      }
    }
  }

  async castVote(value: 'fake' | 'true'): Promise<void> {
    const { pageUrl, vote } = this.state
    if (pageUrl === null || vote.kind === 'voted' || this.votePending) return
    this.votePending = true
    try {
      await this.api.castVote(pageUrl, value)
      await recordVote(pageUrl, value)
      this.update({ vote: { kind: 'voted', value } })
    } catch (error) {
      if (error instanceof ApiError && error.code === 'already_voted') {
        // another popup lifetime voted here; adopt the server's view
        await recordVote(pageUrl, 'unknown')
        this.update({ vote: { kind: 'voted', value: null } })
      } else {
        this.update({ error: describe(error) })
        return
      }
    } finally {
      this.votePending = false
    }
    try {
      this.update({ tally: await this.api.getTally(pageUrl) })
    } catch {
      this.update({ tally: null })
    }
  }

  async revokeVote(): Promise<void> {
    const { pageUrl, vote } = this.state
    if (pageUrl === null || vote.kind !== 'voted' || this.votePending) return
    this.votePending = true
    try {
      await this.api.revokeVote(pageUrl)
    } catch (error) {
      if (!(error instanceof ApiError && error.code === 'not_voted')) {
        this.update({ error: describe(error) })
        this.votePending = false
        return
      }
    }
    await forgetVote(pageUrl)
    this.update({ vote: { kind: 'not-voted' }, tally: null })
    this.votePending = false
  }

  async nextPage(): Promise<void> {
    const { similar, headline } = this.state
    if (similar === null || headline === null) return
    if ((similar.page + 1) * similar.page_size >= similar.total_matches) return
    await this.loadSimilar(headline, similar.page + 1)
  }

  async prevPage(): Promise<void> {
    const { similar, headline } = this.state
    if (similar === null || headline === null || similar.page === 0) return
    await this.loadSimilar(headline, similar.page - 1)
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.message
  if (error instanceof Error) return error.message
  return String(error)
}
