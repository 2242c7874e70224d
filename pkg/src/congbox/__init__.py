"""Exact counting of congruence solutions in boxes and empirical bound checks."""
__version__ = "0.1.0"

from .counting import (BoxSpec, CountResult, SystemSpec, count_bruteforce,  # noqa: F401
                       count_product_only, count_spectral, predicted_density)
from .ffcore import FieldCtx, build_field_ctx, mod_pow, mult_char  # noqa: F401
from .sums import (IntervalWeights, PolyMod, acz_quadruple_count, batch_char_sums,  # noqa: F401
                   exp_sum, fourth_moment, mixed_char_sum)
