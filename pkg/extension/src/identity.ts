// Installation identity: a 128-bit random token generated once and kept in
// extension-local storage. Reinstalling the extension rolls a fresh token.

const INSTALLATION_KEY = 'installationId'
const HISTORY_KEY = 'voteHistory'

export async function getInstallationId(): Promise<string> {
  const stored = (await chrome.storage.local.get(INSTALLATION_KEY))[INSTALLATION_KEY]
  if (typeof stored === 'string' && /^[0-9a-f]{32}$/.test(stored)) {
    return stored
  }
  const bytes = new Uint8Array(16)
  crypto.getRandomValues(bytes)
  const id = Array.from(bytes, (b) => b.toString(16).padStart(2, '0')).join('')
  await chrome.storage.local.set({ [INSTALLATION_KEY]: id })
  return id
}

// The server gates GET /votes behind a prior successful POST, so the popup
// keeps its own record of where this installation has voted. 'unknown' marks
// a vote the server confirmed but whose value this client never saw.

export type VoteHistory = Record<string, 'fake' | 'true' | 'unknown'>

export async function getVoteHistory(): Promise<VoteHistory> {
  const stored = (await chrome.storage.local.get(HISTORY_KEY))[HISTORY_KEY]
  return typeof stored === 'object' && stored !== null ? (stored as VoteHistory) : {}
}

export async function recordVote(url: string, value: 'fake' | 'true' | 'unknown'): Promise<void> {
  const history = await getVoteHistory()
  history[url] = value
  await chrome.storage.local.set({ [HISTORY_KEY]: history })
}

export async function forgetVote(url: string): Promise<void> {
  const history = await getVoteHistory()
  delete history[url]
  await chrome.storage.local.set({ [HISTORY_KEY]: history })
}
