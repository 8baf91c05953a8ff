"""tdroute: vehicle routing with time-dependent travel times.

Layers: exact piecewise-linear arrival-time-function algebra (plf),
per-tour segment-composition stores (touratf), optimal start-time
scheduling (scheduler), a regret/local-search solver (solver), and
benchmark I/O plus a CLI (bench_io).
"""

from . import bench_io, plf, scheduler, solver, touratf

__version__ = "0.1.0"
