import { beforeEach, describe, expect, it } from 'vitest'

import { ApiClient, DEFAULT_BASE_URL } from '../src/api.js'
import { PopupController, PopupState } from '../src/state.js'
import { BackendStub, HEADLINE, claimBackend, installChromeStub } from './helpers.js'

const INSTALLATION = '00112233445566778899aabbccddeeff'
const PAGE_URL = 'https://news.test/storm-story'

let stub: BackendStub
let store: Map<string, unknown>

function controller(): PopupController {
  return new PopupController(new ApiClient(DEFAULT_BASE_URL, INSTALLATION))
}

beforeEach(() => {
  store = installChromeStub(PAGE_URL)
  store.set('installationId', INSTALLATION)
  stub = new BackendStub()
  stub.install()
})

describe('popup open', () => {
  it('moves from loading to ready with headline and assessment', async () => {
    claimBackend(stub)
    const popup = controller()
    const phases: string[] = []
    popup.subscribe((state) => phases.push(state.phase))

    await popup.open(PAGE_URL)
    const state = popup.getState()

    expect(phases[0]).toBe('loading')
    expect(phases[phases.length - 1]).toBe('ready')
    expect(state.headline).toBe(HEADLINE)
    expect(state.author).toBe('R. Example')
    expect(state.assessment?.checkworthy).toBe(true)
    expect(state.similar?.page).toBe(0)
    expect(state.vote.kind).toBe('not-voted')
    expect(state.tally).toBeNull()
  })

  it('shows the view-a-news-source instruction when no headline exists', async () => {
    stub.on('GET', '/headline_detection', () => ({
      status: 404,
      body: { error: { code: 'no_headline', message: 'nothing found' } },
    }))
    const popup = controller()
    await popup.open(PAGE_URL)
    expect(popup.getState().phase).toBe('no-headline')
  })

  it('offers retry when the backend is unreachable, then recovers', async () => {
    const popup = controller()
    await popup.open(PAGE_URL)
    expect(popup.getState().phase).toBe('error')
    expect(popup.getState().error).toBeTruthy()

    claimBackend(stub)
    await popup.retry()
    expect(popup.getState().phase).toBe('ready')
  })

  it('never requests the tally without a recorded vote', async () => {
    claimBackend(stub)
    const popup = controller()
    await popup.open(PAGE_URL)
    expect(stub.callsTo('GET', '/votes')).toHaveLength(0)
  })

  it('drops a stale local vote record when the server gate refuses it', async () => {
    claimBackend(stub)
    store.set('voteHistory', { [PAGE_URL]: 'true' })
    const popup = controller()
    await popup.open(PAGE_URL)
    expect(popup.getState().vote.kind).toBe('not-voted')
    expect(store.get('voteHistory')).toEqual({})
  })
})

describe('voting', () => {
  it('unlocks the community tally after a vote and re-locks after revoking', async () => {
    const backend = claimBackend(stub)
    const popup = controller()

    // the client-side mirror of server gating must hold in every state
    popup.subscribe((state: PopupState) => {
      if (state.vote.kind !== 'voted') expect(state.tally).toBeNull()
    })

    await popup.open(PAGE_URL)
    expect(popup.getState().tally).toBeNull()

    await popup.castVote('true')
    const voted = popup.getState()
    expect(voted.vote).toEqual({ kind: 'voted', value: 'true' })
    expect(voted.tally).toEqual({ fake: 0, mixed: 0, true: 1 })
    expect(backend.votes.size).toBe(1)

    await popup.revokeVote()
    const revoked = popup.getState()
    expect(revoked.vote.kind).toBe('not-voted')
    expect(revoked.tally).toBeNull()
    expect(backend.votes.size).toBe(0)

    // a fresh popup on the same page is locked again and asks nothing gated
    const callsBefore = stub.callsTo('GET', '/votes').length
    const reopened = controller()
    await reopened.open(PAGE_URL)
    expect(reopened.getState().vote.kind).toBe('not-voted')
    expect(stub.callsTo('GET', '/votes')).toHaveLength(callsBefore)
  })

  it('restores a vote cast in an earlier popup lifetime', async () => {
    const backend = claimBackend(stub)
    const first = controller()
    await first.open(PAGE_URL)
    await first.castVote('fake')
    expect(backend.votes.size).toBe(1)

    const second = controller()
    await second.open(PAGE_URL)
    const state = second.getState()
    expect(state.vote).toEqual({ kind: 'voted', value: 'fake' })
    expect(state.tally).toEqual({ fake: 1, mixed: 0, true: 0 })
  })

  it('casts exactly one vote on a double click', async () => {
    const backend = claimBackend(stub)
    const popup = controller()
    await popup.open(PAGE_URL)

    await Promise.all([popup.castVote('true'), popup.castVote('true')])

    expect(stub.callsTo('POST', '/votes')).toHaveLength(1)
    expect(backend.votes.size).toBe(1)
    expect(popup.getState().vote).toEqual({ kind: 'voted', value: 'true' })
  })

  it('resynchronizes from the server on already_voted', async () => {
    const backend = claimBackend(stub)
    backend.votes.set(`${INSTALLATION} ${PAGE_URL}`, 'mixed')
    const popup = controller()
    await popup.open(PAGE_URL)
    expect(popup.getState().vote.kind).toBe('not-voted')

    await popup.castVote('true')
    const state = popup.getState()
    expect(state.vote).toEqual({ kind: 'voted', value: null })
    expect(state.tally).toEqual({ fake: 0, mixed: 1, true: 0 })
    expect(backend.votes.get(`${INSTALLATION} ${PAGE_URL}`)).toBe('mixed')
  })

  it('ignores votes while one is already in flight to a slow backend', async () => {
    claimBackend(stub)
    const popup = controller()
    await popup.open(PAGE_URL)

    const release = stub.hold()
    const inFlight = popup.castVote('true')
    await popup.castVote('fake')
    release()
    await inFlight

    expect(stub.callsTo('POST', '/votes')).toHaveLength(1)
    expect(popup.getState().vote).toEqual({ kind: 'voted', value: 'true' })
  })
})

describe('similar claim pagination', () => {
  it('walks forward through every page and back again', async () => {
    claimBackend(stub, { totalMatches: 12 })
    const popup = controller()
    await popup.open(PAGE_URL)

    expect(popup.getState().similar?.matches).toHaveLength(5)
    expect(popup.getState().similar?.page).toBe(0)

    await popup.nextPage()
    expect(popup.getState().similar?.page).toBe(1)
    expect(popup.getState().similar?.matches).toHaveLength(5)

    await popup.nextPage()
    expect(popup.getState().similar?.page).toBe(2)
    expect(popup.getState().similar?.matches).toHaveLength(2)

    // past the last page: no request, no movement
    const requests = stub.callsTo('GET', '/get_similar_claims').length
    await popup.nextPage()
    expect(popup.getState().similar?.page).toBe(2)
    expect(stub.callsTo('GET', '/get_similar_claims')).toHaveLength(requests)

    await popup.prevPage()
    await popup.prevPage()
    expect(popup.getState().similar?.page).toBe(0)

    await popup.prevPage()
    expect(popup.getState().similar?.page).toBe(0)
  })

  it('keeps match texts aligned with the page cursor', async () => {
    claimBackend(stub, { totalMatches: 7 })
    const popup = controller()
    await popup.open(PAGE_URL)
    await popup.nextPage()
    const similar = popup.getState().similar
    expect(similar?.matches.map((m) => m.claim_text)).toEqual([
      'vetted claim number 5',
      'vetted claim number 6',
    ])
  })
})
