"""Frozen numeric choices.  Each value was fixed once and is not tuned per run."""
import math
from fractions import Fraction

# Net dimension for the refined differences of a disjointness trigraph.
def set_difference_dimension(eps):
    return math.ceil((8 / eps) * math.log(12 / eps))


# Net dimension for the refined differences of a Hamming trigraph with
# sensitivity eps: two sensitivity-eps/2 trigraphs intersected, each bounded
# through the random-subcube argument with its own constants.
HAMMING_ALPHA = math.log((1 + math.sqrt(2)) / 2)


def hamming_difference_dimension(eps):
    a = HAMMING_ALPHA
    return math.ceil((2 / a) * math.log(2 * math.e / a) * 128 / eps ** 2)


# Constant c in vc(T ∩ T) <= ceil(c/eps) for a disjointness trigraph T with
# sensitivity eps.  Calibrated on set-system seeds 1000..1199 (n <= 12,
# eps in {1/2, 1/3, 1/4}): the largest vc * eps seen was 1.
INTERSECTION_CONSTANT = 1

# Default failure probability for every sampled net.
DEFAULT_P = 0.1

# Size budget for majority-digraph domination at eps = 0.1.  Calibrated once on
# profile seeds 1000..1099 (n in {15, 20, 120, 300}, m odd up to 1001): largest
# returned set had 2 vertices.
MAJORITY_BUDGET = {0.1: 2}

# Allowed ratio |X| / exhaustive gamma+ for the fractional-coloring recursion.
RECURSION_RATIO = 8

# eps' = eps * KT_EPS_FACTOR / C(t+1, 2) for the K_t-free regular colouring;
# with t = 3 this gives eps/2, the triangle-free choice.  eta = eps' * KT_ETA_FACTOR.
KT_EPS_FACTOR = 3
KT_ETA_FACTOR = Fraction(1, 4)
