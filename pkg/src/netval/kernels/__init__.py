"""Numeric kernels with interchangeable backends.

Two implementations of the same small kernel API live here: a compiled
extension (built from _core.pyx when a C toolchain is available) and a
pure numpy fallback. The counter-based random stream is integer
arithmetic and therefore bit-identical across backends; transcendental
steps may differ in the last bits between them, which is why regression
anchors are pinned per run, not per backend.

Selection is automatic (compiled when importable), overridable through
the NETVAL_BACKEND environment variable: "pure" forces the fallback,
"compiled" demands the extension and fails loudly if it is missing.

Kernel API, identical in both modules:
  uniforms(seed, stream, start, count)  counter-based U(0,1) draws
  normal_ppf(u)                         inverse normal CDF, elementwise
  dm_chunk(...)                         one chunk of option-payoff paths
  crr_price(...)                        binomial lattice price
"""

import os

BACKENDS = ("auto", "pure", "compiled")

# one chunk of Monte Carlo paths; reductions run in chunk order so the
# result cannot depend on how chunks were distributed over workers
CHUNK = 65536

_requested = os.environ.get("NETVAL_BACKEND", "auto").strip().lower() or "auto"
if _requested not in BACKENDS:
    raise ImportError(
        f"NETVAL_BACKEND={_requested!r} is not one of {', '.join(BACKENDS)}"
    )

if _requested == "pure":
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pure as _impl

        BACKEND = "pure"

PAYOFF_LOGNORMAL = 0
PAYOFF_DISCRETE = 1
STRIKE_CONSTANT = 0
STRIKE_DISCRETE = 1

uniforms = _impl.uniforms
normal_ppf = _impl.normal_ppf
dm_chunk = _impl.dm_chunk
crr_price = _impl.crr_price
