// Minimal surface of the extension platform this popup actually touches.
// Narrower than @types/chrome on purpose: tests substitute a plain object.

interface ChromeStorageArea {
  get(keys: string | string[]): Promise<Record<string, unknown>>
  set(items: Record<string, unknown>): Promise<void>
}

interface ChromeTab {
  url?: string
}

declare const chrome: {
  storage: { local: ChromeStorageArea }
  tabs: { query(info: { active: boolean; currentWindow: boolean }): Promise<ChromeTab[]> }
}
