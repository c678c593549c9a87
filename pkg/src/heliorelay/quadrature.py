"""Adaptive quadrature wrapper with node budgets and error reporting."""

import scipy.integrate


class QuadratureError(RuntimeError):
    """Raised when an integral does not converge within its budget.

    Carries the partial estimate and the achieved error bound so callers
    can report diagnostics instead of silently using a bad number.
    """

    def __init__(self, message, partial=None, error_estimate=None, evaluations=0):
        super().__init__(message)
        self.partial = partial
        self.error_estimate = error_estimate
        self.evaluations = evaluations


# One quad call uses 21-point Gauss-Kronrod panels; 450 panels keeps a
# single capacity evaluation under the 1e4-node budget.
MAX_PANELS = 450


def integrate(f, a, b, points=None, epsrel=1e-8, epsabs=1e-12):
    """Integrate f on [a, b], returning (value, error_estimate, evaluations).

    points: optional interior breakpoints (kinks) passed through to the
    adaptive subdivision.  Raises QuadratureError if the achieved error
    estimate is not trusted by the underlying routine.
    """
    if a == b:
        return 0.0, 0.0, 0
    pts = None
    if points:
        pts = [p for p in points if a < p < b]
        pts = pts or None
    out = scipy.integrate.quad(
        f, a, b, points=pts, epsrel=epsrel, epsabs=epsabs,
        limit=MAX_PANELS, full_output=1,
    )
    value, abserr, info = out[0], out[1], out[2]
    neval = int(info["neval"])
    if len(out) > 3:
        # quad appends an explanation message only on trouble
        raise QuadratureError(
            f"quadrature did not converge on [{a!r}, {b!r}]: {out[3]}",
            partial=value, error_estimate=abserr, evaluations=neval,
        )
    return value, abserr, neval
