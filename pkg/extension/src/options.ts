// Options page: configure the backend base URL.

import { DEFAULT_BASE_URL, getBaseUrl, setBaseUrl } from './api.js'

async function start(): Promise<void> {
  const input = document.getElementById('base-url') as HTMLInputElement | null
  const save = document.getElementById('save')
  const status = document.getElementById('status')
  if (input === null || save === null || status === null) return

  input.value = await getBaseUrl()
  input.placeholder = DEFAULT_BASE_URL

  save.addEventListener('click', () => {
    void (async () => {
      const value = input.value.trim()
      await setBaseUrl(value === '' ? DEFAULT_BASE_URL : value)
      status.textContent = 'Saved.'
      setTimeout(() => {
        status.textContent = ''
      }, 1500)
    })()
  })
}

void start()
