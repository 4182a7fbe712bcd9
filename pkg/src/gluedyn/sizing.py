"""Instance arithmetic in arbitrary precision: padding-run length, total
vertex count, alphabet-power check, and the configuration-space layout.

All quantities are exact Python ints; the totals are exponential in the
variable count, so nothing here may ever round or overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

from .gluing import GadgetFamily


class InstanceConstantsError(ValueError):
    """The family's arithmetic constants are inconsistent for this formula size."""


class UniformityError(ValueError):
    """Total vertex count is not an exact power of the alphabet size."""


def compute_L(s: int, q: int, a: int, b: int, mu: int, alpha: int, log_q_alpha: int) -> int:
    """Length of the padding run: (b/a) * (q**((s+log_q_alpha+1)*mu) - 1) - alpha * 2**s.

    The division must be exact and the result non-negative, otherwise the
    constant package cannot size this formula.
    """
    if a == 0:
        raise InstanceConstantsError("constant a must be non-zero")
    exponent = (s + log_q_alpha + 1) * mu
    numerator = b * (q**exponent - 1)
    if numerator % a != 0:
        raise InstanceConstantsError(
            f"a={a} does not divide b*(q^{exponent}-1)={numerator}"
        )
    value = numerator // a - alpha * (1 << s)
    if value < 0:
        raise InstanceConstantsError(f"padding length is negative ({value}) for s={s}")
    return value


def total_vertices(family: GadgetFamily, s: int, padding: int) -> int:
    """Exact vertex count of the glued dynamics.

    Sum of all copy sizes minus one port tuple per merge: the opener, 2**s
    branch copies, the padding copies and the closer share k ports at each of
    the 2**s + padding + 1 seams.
    """
    sizes = family.sizes
    total = (
        sizes[2]
        + (1 << s) * sizes[0]
        + padding * sizes[4]
        + sizes[3]
        - family.k * ((1 << s) + padding + 1)
    )
    if total < 0:
        raise InstanceConstantsError(f"vertex count is negative ({total}); malformed family")
    return total


def solve_N(total: int, q: int) -> int:
    """N with q**N == total, or a uniformity error."""
    if total < 1:
        raise UniformityError(f"total {total} is not a power of {q}")
    n = 0
    t = total
    while t % q == 0:
        t //= q
        n += 1
    if t != 1:
        raise UniformityError(f"total {total} is not a power of {q}")
    return n


MODE_UNIFORM = "uniform"
MODE_FREE = "free"


@dataclass(frozen=True)
class InstanceSizes:
    s: int
    two_pow_s: int
    L: int
    total: int
    N: int | None
    mode: str


def make_sizes(
    family: GadgetFamily, s: int, uniform: bool = False, L: int | None = None
) -> InstanceSizes:
    if uniform:
        if L is not None:
            raise ValueError("uniform mode computes the padding length itself")
        c = family.constants
        padding = compute_L(s, family.q, c.a, c.b, c.mu, c.alpha, c.log_q_alpha)
        total = total_vertices(family, s, padding)
        n = solve_N(total, family.q)
        return InstanceSizes(s, 1 << s, padding, total, n, MODE_UNIFORM)
    if L is None or L < 0:
        raise ValueError("free mode requires an explicit padding length L >= 0")
    total = total_vertices(family, s, L)
    return InstanceSizes(s, 1 << s, L, total, None, MODE_FREE)


@dataclass(frozen=True)
class Layout:
    """Global label layout of one instance's configuration space.

    Labels run: opener interior, opener secondary block, then one slice per
    branch copy (interior then its secondary block), the padding slices, the
    closer interior, and finally the shared ports at the very top.
    """

    family: GadgetFamily
    s: int
    L: int
    head_end: int  # end of the opener slice
    branch_end: int  # end of the branch band
    tail_start: int  # start of the closer interior
    shared_start: int  # first shared-port label
    total: int

    @classmethod
    def build(cls, family: GadgetFamily, s: int, L: int) -> "Layout":
        head_end = family.head_core + family.k2
        branch_end = head_end + (1 << s) * family.branch_stride
        tail_start = branch_end + L * family.pad_stride
        total = tail_start + family.tail_core + family.k3
        assert total == total_vertices(family, s, L)
        return cls(
            family=family,
            s=s,
            L=L,
            head_end=head_end,
            branch_end=branch_end,
            tail_start=tail_start,
            shared_start=total - family.k3,
            total=total,
        )

    @property
    def copies(self) -> int:
        return (1 << self.s) + self.L + 2

    @property
    def last_copy(self) -> int:
        return self.copies - 1

    def copy_of(self, c: int) -> tuple[int, bool]:
        """Smallest copy index containing global label c, plus the
        secondary-port flag; pure big-int mirror of the copy-index circuit."""
        fam = self.family
        two_s = 1 << self.s
        if c < self.head_end or c >= self.shared_start:
            secondary = c >= self.shared_start or c >= fam.head_core
            return 0, secondary
        if c < self.branch_end:
            offset = c - self.head_end
            return offset // fam.branch_stride + 1, offset % fam.branch_stride >= fam.branch_core
        if c < self.tail_start:
            offset = c - self.branch_end
            return (
                offset // fam.pad_stride + two_s + 1,
                offset % fam.pad_stride >= fam.pad_core,
            )
        return self.last_copy, False

    def gadget_of_copy(self, i: int, branch_letters: "list[int] | None" = None) -> int:
        """Gadget index glued at copy i; branch copies need the letter word."""
        two_s = 1 << self.s
        if i == 0:
            return 2
        if i <= two_s:
            if branch_letters is None:
                raise ValueError("branch letters required for branch copies")
            return branch_letters[i - 1]
        if i <= two_s + self.L:
            return 4
        if i == self.last_copy:
            return 3
        raise ValueError(f"copy index {i} out of range")

    def slice_start(self, i: int) -> int:
        """First global label of copy i's own slice (its interior)."""
        two_s = 1 << self.s
        if i == 0:
            return 0
        if i <= two_s:
            return self.head_end + (i - 1) * self.family.branch_stride
        if i <= two_s + self.L:
            return self.branch_end + (i - two_s - 1) * self.family.pad_stride
        if i == self.last_copy:
            return self.tail_start
        raise ValueError(f"copy index {i} out of range")

    def global_label(self, i: int, gadget: int, v: int) -> int:
        """Global label of local vertex v of copy i (gadget index given).

        Shared ports map to the top block regardless of the copy; primary-only
        ports land in the previous copy's secondary block, which is exactly
        `slice_start(i) - k2 + v`.
        """
        fam = self.family
        size = fam.graphs[gadget].size
        if v >= size - fam.k3:  # shared port
            return self.total - size + v
        if i == 0:
            return v
        return self.slice_start(i) - fam.k2 + v

    def local_label(self, c: int, gadget: int, i: int) -> int:
        """Inverse of `global_label` on this copy's label range."""
        fam = self.family
        size = fam.graphs[gadget].size
        if c >= self.shared_start:
            return c - self.total + size
        if i == 0:
            return c
        return c - self.slice_start(i) + fam.k2
