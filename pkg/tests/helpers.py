import math

from marc_dualband.allocator import MmWaveGains


def p1_rate(g: MmWaveGains, a) -> float:
    """Normalised sum rate in bits: ``min(relay, log2 gamma) + direct``."""
    relay = math.log2((1 + g.r1 * a.q1) * (1 + g.r2 * a.q2))
    direct = math.log2((1 + g.d1 * a.p1) * (1 + g.d2 * a.p2))
    return min(relay, math.log2(g.gamma)) + direct
