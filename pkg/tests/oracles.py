"""Independent faithful representations used as word-problem oracles.

Edge u-v with Z/2 groups is the Klein four-group; a word maps to its
parity vector.  P3 u-v-w with Z/2 groups is Z/2 x D_inf: v is central and
u, w act on the line by x -> -x and x -> 1 - x.  Two isolated vertices
with Z/2 groups give D_inf with the same affine maps.
"""


def klein(ctx, word):
    par = [0] * ctx.n
    for v, a in word:
        par[v] ^= a
    return tuple(par)


def p3_rep(ctx, word):
    """(parity of v, s, t) for the affine map x -> s*x + t."""
    iu, iv, iw = (ctx.vindex(x) for x in "uvw")
    par, s, t = 0, 1, 0
    for v, _ in word:
        if v == iv:
            par ^= 1
        elif v == iu:
            s, t = -s, -t
        elif v == iw:
            s, t = -s, 1 - t
    return par, s, t


def iso_rep(word):
    s, t = 1, 0
    for v, _ in word:
        s, t = (-s, -t) if v == 0 else (-s, 1 - t)
    return s, t
