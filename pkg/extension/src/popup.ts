// Popup entry point: wires the active tab, the controller, and the view.

import { createClient } from './api.js'
import { getInstallationId } from './identity.js'
import { PopupController } from './state.js'
import { renderPopup } from './render.js'

async function start(): Promise<void> {
  const root = document.getElementById('root')
  if (root === null) return

  const installationId = await getInstallationId()
  const api = await createClient(installationId)
  const controller = new PopupController(api)

  controller.subscribe((state) => {
    root.innerHTML = renderPopup(state)
  })

  root.addEventListener('click', (event) => {
    const target = (event.target as HTMLElement).closest('[data-action]')
    if (target === null) return
    switch (target.getAttribute('data-action')) {
      case 'retry':
        void controller.retry()
        break
      case 'vote-fake':
        void controller.castVote('fake')
        break
      case 'vote-true':
        void controller.castVote('true')
        break
      case 'revoke':
        void controller.revokeVote()
        break
      case 'prev-page':
        void controller.prevPage()
        break
      case 'next-page':
        void controller.nextPage()
        break
    }
  })

  const tabs = await chrome.tabs.query({ active: true, currentWindow: true })
  const url = tabs[0]?.url
  if (url === undefined) {
    root.innerHTML = '<div class="instruction">Open a news story to check its accuracy.</div>'
    return
  }
  await controller.open(url)
}

void start()
