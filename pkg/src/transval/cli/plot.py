"""SVG line plots of Herbrand functions.

Q(sigma) has no metric, so values are drawn after the display
specialization sigma -> q; the chosen q is printed on the plot.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Tuple
from xml.sax.saxutils import escape

from ..sigma import SigmaRational, specialize_q
from ..tropical import PiecewiseTA

WIDTH, HEIGHT, PAD = 480, 320, 40


def _num(x: SigmaRational, q: int) -> Fraction:
    return Fraction(specialize_q(x, q))


def emit_plot(psi: Optional[PiecewiseTA], q: int = 4) -> str:
    """Polyline with breakpoint markers and slope labels; axes only when empty."""
    parts: List[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<line class="axis" x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<line class="axis" x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
        f'<text x="{WIDTH - PAD}" y="{PAD / 2}" text-anchor="end" font-size="12">display q = {q}</text>',
    ]
    pieces = psi.pieces if psi is not None else ()
    if pieces:
        breaks = [_num(b, q) for b in psi.breakpoints()]
        end = _num(psi.domain_end, q) if isinstance(psi.domain_end, SigmaRational) else None
        anchors = breaks + ([end] if end is not None else [])
        lo = min(anchors) if anchors else Fraction(-1)
        hi = max(anchors) if anchors else Fraction(1)
        span = max(hi - lo, Fraction(1))
        lo, hi = lo - span / 2, (hi if end is not None else hi + span / 2)
        xs = [lo] + breaks + [hi]
        pts: List[Tuple[Fraction, Fraction]] = []
        for k, x in enumerate(xs):
            pc = pieces[min(k, len(pieces) - 1)]
            val = _num(pc.intercept, q) + Fraction(pc.slope.specialize(q)) * x
            pts.append((x, val))
        ys = [y for _, y in pts]
        ylo, yhi = min(ys), max(ys)
        yspan = max(yhi - ylo, Fraction(1))

        def sx(x):
            return float(PAD + (x - lo) / (hi - lo) * (WIDTH - 2 * PAD))

        def sy(y):
            return float(HEIGHT - PAD - (y - ylo) / yspan * (HEIGHT - 2 * PAD))

        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline class="psi" points="{coords}" fill="none" stroke="steelblue" stroke-width="2"/>')
        for x, y in pts[1:-1]:
            parts.append(f'<circle class="breakpoint" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="4" fill="crimson"/>')
        for k, pc in enumerate(pieces):
            (x0, y0), (x1, y1) = pts[k], pts[k + 1]
            mx, my = (sx(x0) + sx(x1)) / 2, (sy(y0) + sy(y1)) / 2 - 8
            parts.append(
                f'<text class="slope" x="{mx:.2f}" y="{my:.2f}" font-size="12">slope {escape(str(pc.slope))}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
