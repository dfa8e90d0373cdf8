// Community tally pie: red for fake, yellow for mixed, green for true.

import { Tally } from './api.js'

export const SEGMENT_COLORS = {
  fake: '#d64545',
  mixed: '#e3b341',
  true: '#3f9d56',
} as const

export interface PieSegment {
  label: keyof typeof SEGMENT_COLORS
  count: number
  share: number
  color: string
}

export function pieSegments(tally: Tally): PieSegment[] {
  const total = tally.fake + tally.mixed + tally.true
  const order: Array<keyof typeof SEGMENT_COLORS> = ['fake', 'mixed', 'true']
  return order.map((label) => ({
    label,
    count: tally[label],
    share: total === 0 ? 0 : tally[label] / total,
    color: SEGMENT_COLORS[label],
  }))
}

export function conicGradient(segments: PieSegment[]): string {
  const total = segments.reduce((sum, segment) => sum + segment.count, 0)
  if (total === 0) {
    return 'conic-gradient(#cccccc 0% 100%)'
  }
  const stops: string[] = []
  let position = 0
  for (const segment of segments) {
    if (segment.count === 0) continue
    const start = position
    position += segment.share * 100
    stops.push(`${segment.color} ${round2(start)}% ${round2(position)}%`)
  }
  return `conic-gradient(${stops.join(', ')})`
}

export function segmentTitle(segment: PieSegment): string {
  const percent = Math.round(segment.share * 100)
  return `${segment.label}: ${segment.count} (${percent}%)`
}

function round2(value: number): number {
  return Math.round(value * 100) / 100
}
