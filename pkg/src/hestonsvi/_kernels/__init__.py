"""Kernel backend selection.

The compiled extension is preferred when it built; the NumPy implementation
is the fallback.  Set HESTON_SVI_PURE_PYTHON=1 to force the fallback (used by
the backend-parity tests and the benchmark).
"""

import os

from . import pykernels

if os.environ.get("HESTON_SVI_PURE_PYTHON"):
    impl = pykernels
else:
    try:
        from . import _ckernels as impl  # type: ignore[no-redef]
    except ImportError:
        impl = pykernels

BACKEND = impl.BACKEND

heston_cf = impl.heston_cf
lewis_integrand = impl.lewis_integrand
lewis_kernel_re = impl.lewis_kernel_re
lewis_kernel_im = impl.lewis_kernel_im
norm_cdf = impl.norm_cdf
bs_call = impl.bs_call
svi_variance = impl.svi_variance
asym_variance_closed = impl.asym_variance_closed
asym_variance_pipeline = impl.asym_variance_pipeline
