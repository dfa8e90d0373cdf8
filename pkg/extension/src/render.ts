// Pure view layer: PopupState in, HTML string out. The popup entry point
// assigns the result to the root element and delegates clicks by the
// data-action attributes produced here.

import { PopupState } from './state.js'
import { conicGradient, pieSegments, segmentTitle } from './pie.js'

export function renderPopup(state: PopupState): string {
  switch (state.phase) {
    case 'loading':
      return '<div class="loading">Analyzing this page…</div>'
    case 'no-headline':
      return (
        '<div class="instruction">No headline found on this page. ' +
        'Open a news story to check its accuracy.</div>'
      )
    case 'error':
      return (
        `<div class="error">${escapeHtml(state.error ?? 'Something went wrong.')}</div>` +
        '<button data-action="retry">Retry</button>'
      )
    case 'ready':
      return renderReady(state)
  }
}

function renderReady(state: PopupState): string {
  const author = state.author ? `<div class="author">by ${escapeHtml(state.author)}</div>` : ''
  return (
    `<header><h1>${escapeHtml(state.headline ?? '')}</h1>${author}</header>` +
    '<section class="assessment"><h2>Accuracy Assessment</h2>' +
    renderAutomated(state) +
    renderCommunity(state) +
    renderSimilar(state) +
    '</section>'
  )
}

function renderAutomated(state: PopupState): string {
  let body: string
  if (state.assessmentError !== null) {
    body = `<p class="unavailable">${escapeHtml(state.assessmentError)}</p>`
  } else if (state.assessment === null) {
    body = '<p class="unavailable">Automated review unavailable.</p>'
  } else if (!state.assessment.checkworthy) {
    body = '<p>This headline does not look like a checkable factual claim.</p>'
  } else {
    const verdict = state.assessment.verdict === 1 ? 'likely accurate' : 'likely false'
    const confidence =
      state.assessment.probability === null
        ? ''
        : ` (model confidence ${Math.round(
            (state.assessment.verdict === 1
              ? state.assessment.probability
              : 1 - state.assessment.probability) * 100
          )}%)`
    body = `<p>The classifier rates this headline <strong>${verdict}</strong>${confidence}.</p>`
  }
  return `<details open class="automated"><summary>Automated review</summary>${body}</details>`
}

function renderCommunity(state: PopupState): string {
  let body: string
  if (state.vote.kind !== 'voted') {
    body =
      '<p class="locked">Community results unlock after you cast your own vote.</p>' +
      '<button data-action="vote-fake">Looks false</button>' +
      '<button data-action="vote-true">Looks accurate</button>'
  } else {
    const segments = state.tally === null ? [] : pieSegments(state.tally)
    const pie =
      state.tally === null
        ? '<p class="unavailable">Tally unavailable.</p>'
        : `<div class="pie" style="background-image: ${conicGradient(segments)}"></div>` +
          '<ul class="legend">' +
          segments
            .map(
              (segment) =>
                `<li title="${segmentTitle(segment)}">` +
                `<span class="swatch" style="background:${segment.color}"></span>` +
                `${segment.label}: ${segment.count}</li>`
            )
            .join('') +
          '</ul>'
    const yours =
      state.vote.value === null
        ? '<p class="your-vote">You voted on this page.</p>'
        : `<p class="your-vote">Your vote: ${state.vote.value}.</p>`
    body = pie + yours + '<button data-action="revoke">Revoke my vote</button>'
  }
  return `<details open class="community"><summary>Community review</summary>${body}</details>`
}

function renderSimilar(state: PopupState): string {
  let body: string
  if (state.similar === null) {
    body = '<p class="unavailable">Similar claims unavailable.</p>'
  } else if (state.similar.total_matches === 0) {
    body = '<p>No similar vetted claims found.</p>'
  } else {
    const { matches, page, page_size, total_matches } = state.similar
    const first = page * page_size + 1
    const last = page * page_size + matches.length
    const items = matches
      .map(
        (match) =>
          `<li><span class="score">${match.score}</span> ` +
          `<span class="label ${match.verdict === 1 ? 'true' : 'false'}">` +
          `${escapeHtml(match.original_label)}</span> ` +
          `${escapeHtml(match.claim_text)}</li>`
      )
      .join('')
    const prevDisabled = page === 0 ? ' disabled' : ''
    const nextDisabled = last >= total_matches ? ' disabled' : ''
    body =
      `<ol class="matches">${items}</ol>` +
      `<nav class="pager"><button data-action="prev-page"${prevDisabled}>Previous</button>` +
      `<span>${first}–${last} of ${total_matches}</span>` +
      `<button data-action="next-page"${nextDisabled}>Next</button></nav>`
  }
  return `<details class="similar"><summary>Similar vetted claims</summary>${body}</details>`
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;')
}
