"""meanlab: a numerical laboratory for mean values of arithmetic functions.

Exact sieved summatory functions on one side, truncated-Euler-product
predictors with measured error budgets on the other; plus weighted
distribution and moment asymptotics for additive functions and sifted mean
values for non-negative multiplicative functions.
"""

from .errors import (EvaluationError, MeanlabError, PreconditionError,
                     ResourceError, SpecParseError)
from .exprs import parse_spec
from .funcspec import (AddSpec, BlockMinorant, MultSpec, ValueTable,
                       bigomega, bigomega_exp, block_minorant, cofactor,
                       convolve_spec, convolve_table, dirichlet_identity,
                       divisor, eval_add, eval_mult, exp_extension,
                       exp_extension_spec, omega, omega_exp, one,
                       restrict_coprime, squarefree, squarefree_split,
                       summatory, twist)
from .moments import (DistReport, MomentReport, dist_F, ek_report,
                      gaussian_moment, moment_G, phi, tail_check)
from .predict import (Comparison, Prediction, compare, euler_product,
                      lemma_2_2_ratio, local_factor, local_sum_W,
                      min_local_factor, predict_1_6, predict_1_13,
                      predict_2_3, predict_4_5)
from .primesums import (AdditiveStats, ConditionReport, ConstantSet, Params,
                        additive_stats, check_condition, class_membership,
                        constants, default_params, prime_sum_Z)
from .sieve import (Factorization, PrimeTable, SpfTable, build_primes,
                    build_spf, factorize)

__version__ = "0.1.0"
