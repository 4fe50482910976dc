import logging
from dataclasses import dataclass, replace
from itertools import product as cartesian
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from pgx.core import UNIT, PartialGroup, Word, sub_partial_group
from pgx.errors import ActionError, DomainError, InternalError, MalformedWordError, StructuralError, \
    UndefinedProductError, VerificationError
from pgx.maps import AutData, Homomorphism, NerveSimplex, automorphisms, check_homomorphism, check_simplex, \
    find_homomorphism_violation, find_homotopy_violation, nerve_degeneracy, nerve_face, nerve_identity, \
    nerve_product, normalizer
from pgx.utils import SEARCH_CAP, check_cap

logger = logging.getLogger(__name__)


class TwistingPair:
    """An automorphism t(g) per base letter and an N-valued eta on length-2 base words (absent entries are 1)."""

    def __init__(self, base: PartialGroup, fiber: PartialGroup, aut: AutData, t: Sequence[int],
                 eta: Mapping[Tuple[int, int], int] = None):
        if aut.partial_group is not fiber:
            raise StructuralError(f"automorphism data does not belong to {fiber.name}")
        if len(t) != base.size:
            raise MalformedWordError(f"t covers {len(t)} of {base.size} letters of {base.name}")
        if any(not 0 <= i < len(aut) for i in t):
            raise MalformedWordError("t names an unknown automorphism")
        self._base = base
        self._fiber = fiber
        self._aut = aut
        self._t = tuple(t)
        self._eta: Dict[Tuple[int, int], int] = {}
        for (g, h), x in (eta or {}).items():
            if (g, h) not in base.domain:
                raise DomainError(f"eta is given on {base.word_str((g, h))}, not a domain word of {base.name}",
                                  witness=(g, h))
            if x not in aut.normalizer_data:
                raise DomainError(f"eta{base.word_str((g, h))} = {fiber.names[x]} is not in N({fiber.name})",
                                  witness=(g, h))
            if x != UNIT:
                self._eta[(g, h)] = x

    @property
    def base(self) -> PartialGroup:
        return self._base

    @property
    def fiber(self) -> PartialGroup:
        return self._fiber

    @property
    def aut(self) -> AutData:
        return self._aut

    @property
    def t(self) -> Tuple[int, ...]:
        return self._t

    @property
    def eta(self) -> Dict[Tuple[int, int], int]:
        return dict(self._eta)

    def t_of(self, g: int) -> int:
        return self._t[g]

    def eta_of(self, g: int, h: int) -> int:
        if g == UNIT or h == UNIT:
            return UNIT
        return self._eta.get((g, h), UNIT)

    def twist(self, g: int, x: int) -> int:
        """t(g)(x)"""
        return self._aut.apply(self._t[g], x)

    def with_eta(self, eta: Mapping[Tuple[int, int], int]) -> "TwistingPair":
        return TwistingPair(self._base, self._fiber, self._aut, self._t, eta)


def find_twisting_pair_violation(pair: TwistingPair) -> Optional[Tuple[str, Word]]:
    base, fiber, aut = pair.base, pair.fiber, pair.aut
    if pair.t_of(UNIT) != 0:
        return "b", ()
    for g, h in base.domain_words(2):
        alpha = aut.compose(pair.t_of(g), pair.t_of(h))
        beta = pair.t_of(base.mul(g, h))
        eta = pair.eta_of(g, h)
        if not aut.is_morphism(alpha, eta, beta) or find_homotopy_violation(aut[alpha], aut[beta], eta) is not None:
            return "a", (g, h)
    for g, h, k in base.domain_words(3):
        lhs = fiber.mul(pair.twist(g, pair.eta_of(h, k)), pair.eta_of(g, base.mul(h, k)))
        rhs = fiber.mul(pair.eta_of(g, h), pair.eta_of(base.mul(g, h), k))
        if lhs != rhs:
            return "c", (g, h, k)
    return None


def validate_twisting_pair(pair: TwistingPair) -> TwistingPair:
    violation = find_twisting_pair_violation(pair)
    if violation is not None:
        condition, word = violation
        raise VerificationError(f"not a twisting pair: condition ({condition}) fails at {pair.base.word_str(word)}",
                                witness=violation)
    return pair


@dataclass(frozen=True)
class Extension:
    pair: TwistingPair
    total: PartialGroup
    tau: Homomorphism
    iota: Homomorphism
    canonical_section: Optional[Homomorphism] = None

    @property
    def base(self) -> PartialGroup:
        return self.pair.base

    @property
    def fiber(self) -> PartialGroup:
        return self.pair.fiber

    @property
    def level(self) -> int:
        return self.total.level

    def letter(self, x: int, g: int) -> int:
        return g * self.fiber.size + x

    def coordinates(self, letter: int) -> Tuple[int, int]:
        return letter % self.fiber.size, letter // self.fiber.size

    def check(self):
        constant = {self.tau(self.iota(x)) for x in range(self.fiber.size)}
        if constant != {UNIT}:
            raise InternalError(f"{self.total.name}: tau after iota is not constant")
        for n in range(2, self.level + 1):
            for w in self.base.domain_words(n):
                if tuple(self.letter(UNIT, g) for g in w) not in self.total.domain:
                    raise InternalError(f"{self.total.name}: tau misses {self.base.word_str(w)}", witness=w)


def _total_names(fiber: PartialGroup, base: PartialGroup) -> List[str]:
    names = [f"({fiber.names[x]},{base.names[g]})" for g in range(base.size) for x in range(fiber.size)]
    names[UNIT] = "1"
    return names


def _enumerate_domain(pair: TwistingPair, level: int) -> List[Word]:
    """Words [(x1,g1)|...] with [g1|...] in D_H and [x1|t(g1)x2|...] in D_M, grown one letter at a time."""
    base, fiber, aut = pair.base, pair.fiber, pair.aut
    m = fiber.size
    letters = [(g * m + x, x, g) for g in range(base.size) for x in range(fiber.size) if g * m + x != UNIT]
    # (word, base word, twisted fiber word, t(g1)...t(gn))
    frontier = [((l,), (g,), (x,), pair.t_of(g)) for l, x, g in letters]
    domain: List[Word] = []
    for _ in range(2, level + 1):
        grown = []
        for word, base_word, fiber_word, twist in frontier:
            for l, x, g in letters:
                b = base_word + (g,)
                if not base.member(b):
                    continue
                f = fiber_word + (aut.apply(twist, x),)
                if not fiber.member(f):
                    continue
                grown.append((word + (l,), b, f, aut.compose(twist, pair.t_of(g))))
        domain.extend(state[0] for state in grown)
        frontier = grown
    return domain


def twisted_product(pair: TwistingPair, validate: bool = True) -> Extension:
    base, fiber = pair.base, pair.fiber
    level = min(fiber.level, base.level)
    m = fiber.size
    if validate:
        validate_twisting_pair(pair)

    def letter(x: int, g: int) -> int:
        return g * m + x

    try:
        inv = []
        for g in range(base.size):
            g_inv = base.inv(g)
            for x in range(m):
                y = fiber.mul(fiber.inv(pair.eta_of(g_inv, g)), pair.twist(g_inv, fiber.inv(x)))
                inv.append(letter(y, g_inv))
        domain = _enumerate_domain(pair, level)
        products = {}
        for l1, l2 in (w for w in domain if len(w) == 2):
            (x, g), (z, h) = (l1 % m, l1 // m), (l2 % m, l2 // m)
            y = fiber.mul(fiber.mul(x, pair.twist(g, z)), pair.eta_of(g, h))
            products[(l1, l2)] = letter(y, base.mul(g, h))
    except UndefinedProductError as e:
        raise InternalError(f"twisted product of {fiber.name} by {base.name}: {e}", witness=e.witness)

    total = PartialGroup(_total_names(fiber, base), inv, domain, products, level,
                         fiber.complete and base.complete, f"{fiber.name}x{base.name}")
    logger.debug("%s: %d domain words at level %d", total.name, len(domain), level)
    tau = Homomorphism(total, base, tuple(l // m for l in range(total.size)))
    iota = Homomorphism(fiber, total, tuple(letter(x, UNIT) for x in range(m)))
    extension = Extension(pair, total, tau, iota)
    if validate:
        report = total.validate()
        if not report.ok:
            raise InternalError(f"{total.name} is not a partial group: {report.first()}", witness=report.first())
        for h in (tau, iota):
            witness = find_homomorphism_violation(h.images, h.source, h.target)
            if witness is not None:
                raise InternalError(f"{total.name}: projection or inclusion fails at {witness}", witness=witness)
        extension.check()
        witness = find_inverse_violation(extension)
        if witness is not None:
            raise InternalError(f"{total.name}: inverse formula fails at {total.names[witness]}", witness=witness)
    return extension


def find_inverse_violation(extension: Extension) -> Optional[int]:
    """A letter z with Pi[z^-1|z] != 1, or None."""
    total = extension.total
    for z in range(1, total.size):
        if total.try_pi((total.inv(z), z)) != UNIT:
            return z
    return None


def check_action(base: PartialGroup, aut: AutData, rho: Sequence[int]) -> Tuple[int, ...]:
    if len(rho) != base.size:
        raise MalformedWordError(f"action covers {len(rho)} of {base.size} letters of {base.name}")
    if rho[UNIT] != 0:
        raise ActionError(f"the unit of {base.name} does not act trivially", witness=())
    for g, h in base.domain_words(2):
        if aut.compose(rho[g], rho[h]) != rho[base.mul(g, h)]:
            raise ActionError(f"action is not multiplicative at {base.word_str((g, h))}", witness=(g, h))
    return tuple(rho)


def semidirect(fiber: PartialGroup, base: PartialGroup, aut: AutData, rho: Sequence[int]) -> Extension:
    pair = TwistingPair(base, fiber, aut, check_action(base, aut, rho))
    extension = twisted_product(pair)
    images = [extension.letter(UNIT, g) for g in range(base.size)]
    try:
        sigma = check_homomorphism(images, base, extension.total)
    except VerificationError as e:
        raise InternalError(f"canonical section of {extension.total.name} fails: {e}", witness=e.witness)
    return replace(extension, canonical_section=sigma)


def expand_twisting_function(pair: TwistingPair, w: Sequence[int]) -> NerveSimplex:
    """The (m-1)-simplex of the automorphism nerve attached to a base word of length m; units allowed."""
    base, fiber, aut = pair.base, pair.fiber, pair.aut
    m = len(w)
    if m < 1:
        raise IndexError("the twisting function starts in dimension 1")
    if not base.member(w):
        raise UndefinedProductError(f"{base.word_str(w)} is not in the domain of {base.name}", witness=tuple(w))

    def h(i: int, j: int) -> int:
        return base.pi(w[i - 1:j]) if j >= i else UNIT

    objects = [pair.t_of(w[0])]
    for j in range(1, m):
        objects.append(aut.compose(pair.t_of(h(1, j + 1)), aut.inverse(pair.t_of(h(2, j + 1)))))
    labels = [fiber.mul(fiber.inv(pair.eta_of(w[0], h(2, j + 1))), pair.eta_of(w[0], h(2, j + 2)))
              for j in range(m - 1)]
    return NerveSimplex(tuple(objects), tuple(labels))


@dataclass
class TwistingFunctionReport:
    failures: List[Tuple[str, Word]]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def identities_failing(self) -> List[str]:
        return sorted({identity for identity, _ in self.failures})


def check_twisting_function(pair: TwistingPair, max_len: Optional[int] = None) -> TwistingFunctionReport:
    """Check the four face/degeneracy identities of the twisting function on every stored base word.

    "1": phi(d_i b) = d_{i-1} phi(b) for i >= 2; "2": phi(d_1 b) = d_0 phi(b) . phi(d_0 b);
    "3": phi(s_i b) = s_{i-1} phi(b) for i >= 1; "4": phi(s_0 b) is the identity simplex.
    "chain" marks simplices whose arrows are not morphisms of the automorphism category.
    """
    base, aut = pair.base, pair.aut
    top = base.level if max_len is None else min(max_len, base.level)
    failures: List[Tuple[str, Word]] = []
    checked = 0

    def phi(word: Sequence[int]) -> NerveSimplex:
        return expand_twisting_function(pair, word)

    for b in base.words(top):
        n = len(b)
        if n == 0:
            continue
        checked += 1
        image = phi(b)
        if not check_simplex(aut, image):
            failures.append(("chain", b))
        for i in range(2, n + 1):
            if phi(base.face(b, i)) != nerve_face(aut, image, i - 1):
                failures.append(("1", b))
                break
        if n >= 2:
            if phi(base.face(b, 1)) != nerve_product(aut, nerve_face(aut, image, 0), phi(base.face(b, 0))):
                failures.append(("2", b))
        for i in range(1, n + 1):
            if phi(base.degeneracy(b, i)) != nerve_degeneracy(aut, image, i - 1):
                failures.append(("3", b))
                break
        if phi(base.degeneracy(b, 0)) != nerve_identity(aut, n):
            failures.append(("4", b))
    if failures:
        logger.info("twisting function: %d failures, first %s", len(failures), failures[0])
    return TwistingFunctionReport(failures, checked)


class OuterAction:
    """A homomorphism from the base to Out of the fiber, as out-class indices per base letter."""

    def __init__(self, base: PartialGroup, aut: AutData, classes: Sequence[int]):
        if len(classes) != base.size:
            raise MalformedWordError(f"outer action covers {len(classes)} of {base.size} letters of {base.name}")
        self._base = base
        self._aut = aut
        self._classes = tuple(classes)
        if self._classes[UNIT] != aut.out_class_of(0):
            raise ActionError(f"the unit of {base.name} acts by a non-trivial outer class", witness=())
        for g, h in base.domain_words(2):
            if aut.out_multiply(self._classes[g], self._classes[h]) != self._classes[base.mul(g, h)]:
                raise ActionError(f"outer action is not multiplicative at {base.word_str((g, h))}", witness=(g, h))

    @classmethod
    def from_automorphisms(cls, base: PartialGroup, aut: AutData, representatives: Sequence[int]) -> "OuterAction":
        return cls(base, aut, [aut.out_class_of(i) for i in representatives])

    @classmethod
    def trivial(cls, base: PartialGroup, aut: AutData) -> "OuterAction":
        return cls(base, aut, [aut.out_class_of(0)] * base.size)

    @property
    def base(self) -> PartialGroup:
        return self._base

    @property
    def aut(self) -> AutData:
        return self._aut

    @property
    def classes(self) -> Tuple[int, ...]:
        return self._classes

    def __call__(self, g: int) -> int:
        return self._classes[g]

    def __eq__(self, other) -> bool:
        return isinstance(other, OuterAction) and self._aut is other._aut and self._classes == other._classes

    def __hash__(self):
        return hash(self._classes)

    def lift(self, g: int, rank: int = 0) -> int:
        """The rank-th least automorphism in the class of g; the unit always lifts to the identity."""
        if g == UNIT:
            return 0
        members = self._aut.out_classes[self._classes[g]]
        return members[min(rank, len(members) - 1)]


def induced_outer_action(extension: Extension) -> OuterAction:
    pair = extension.pair
    return OuterAction.from_automorphisms(pair.base, pair.aut, pair.t)


def conjugation_action(extension: Extension, z: int) -> int:
    """Aut index of y -> x.t(g)(y).x^-1 for a letter z = (x, g) of the normalizer partial subgroup."""
    pair, fiber, total = extension.pair, extension.fiber, extension.total
    x, g = extension.coordinates(z)
    if x not in pair.aut.normalizer_data:
        raise DomainError(f"{total.names[z]} is not in the normalizer partial subgroup", witness=(z,))
    images = [fiber.mul(fiber.mul(x, pair.twist(g, y)), fiber.inv(x)) for y in range(fiber.size)]
    index = pair.aut.index_of(images)
    z_inv = total.inv(z)
    for y in range(fiber.size):
        value = total.try_pi((z, extension.letter(y, UNIT), z_inv))
        if value is not None and value != extension.letter(images[y], UNIT):
            raise InternalError(f"{total.name}: conjugation by {total.names[z]} disagrees at {fiber.names[y]}",
                                witness=(z, y))
    return index


@dataclass
class NormalizerSubextension:
    extension: Extension
    restriction: Optional[PartialGroup]
    letters: Tuple[int, ...]
    consistent: bool


def normalizer_subextension(extension: Extension) -> NormalizerSubextension:
    """The extension with fiber B(N(M)), cross-checked against the letters (x, g) of E with x in N(M)."""
    pair, fiber, base = extension.pair, extension.fiber, extension.base
    fiber_n, embedding = sub_partial_group(fiber, pair.aut.normalizer, f"N({fiber.name})")
    index = {old: new for new, old in enumerate(embedding)}
    aut_n = automorphisms(fiber_n)
    t_n = [aut_n.index_of([index[pair.twist(g, x)] for x in embedding]) for g in range(base.size)]
    eta_n = {key: index[x] for key, x in pair.eta.items()}
    sub = twisted_product(TwistingPair(base, fiber_n, aut_n, t_n, eta_n))

    letters = tuple(extension.letter(x, g) for g in range(base.size) for x in embedding)
    try:
        restriction, total_embedding = sub_partial_group(extension.total, letters, f"N_{extension.total.name}")
    except StructuralError as e:
        logger.info("%s: normalizer letters do not form a partial subgroup: %s", extension.total.name, e)
        return NormalizerSubextension(sub, None, letters, False)
    position = {old: new for new, old in enumerate(total_embedding)}
    to_restriction = [position[extension.letter(embedding[x], g)]
                      for g in range(base.size) for x in range(fiber_n.size)]
    mapped = {tuple(to_restriction[l] for l in w) for w in sub.total.domain}
    consistent = mapped == set(restriction.domain) and restriction.validate().ok
    if not consistent:
        logger.info("%s: normalizer partial subgroup differs from the B(N) extension", extension.total.name)
    return NormalizerSubextension(sub, restriction, letters, consistent)


@dataclass
class NGroupExtension:
    fiber: Tuple[int, ...]
    total: Tuple[int, ...]
    base: Tuple[int, ...]


def n_group_extension(extension: Extension) -> NGroupExtension:
    """N(M) -> N(E) -> N(H): iota into, tau onto, kernel exactly the image of iota."""
    n_fiber = extension.pair.aut.normalizer
    n_total = normalizer(extension.total).elements
    n_base = normalizer(extension.base).elements
    image = {extension.iota(x) for x in n_fiber}
    if not image <= set(n_total):
        raise InternalError(f"{extension.total.name}: iota does not map N(M) into N(E)")
    if {extension.tau(z) for z in n_total} != set(n_base):
        raise InternalError(f"{extension.total.name}: tau does not map N(E) onto N(H)")
    if {z for z in n_total if extension.tau(z) == UNIT} != image:
        raise InternalError(f"{extension.total.name}: kernel of N(E) -> N(H) is not N(M)")
    return NGroupExtension(n_fiber, n_total, n_base)


def _same_partial_group(a: PartialGroup, b: PartialGroup) -> bool:
    return a is b or (a.names == b.names and a.level == b.level and a.domain == b.domain
                      and a.products == b.products and a.inversion == b.inversion)


def find_equivalence(e1: Extension, e2: Extension, cap: int = SEARCH_CAP) -> Optional[Tuple[int, ...]]:
    """First theta (lexicographic) with (x, g) -> (x.theta(g), g) an isomorphism e1 -> e2, or None."""
    fiber, base = e1.fiber, e1.base
    if not (_same_partial_group(fiber, e2.fiber) and _same_partial_group(base, e2.base)
            and e1.level == e2.level):
        raise StructuralError("equivalence needs extensions with the same fiber, base and level")
    check_cap("extension equivalence", fiber.size ** max(base.size - 1, 0), cap)
    if e1.total.census() != e2.total.census():
        return None
    for rest in cartesian(range(fiber.size), repeat=base.size - 1):
        theta = (UNIT,) + rest
        images = []
        for z in range(e1.total.size):
            x, g = e1.coordinates(z)
            y = fiber.try_pi((x, theta[g]))
            if y is None:
                break
            images.append(e2.letter(y, g))
        else:
            if len(set(images)) == len(images) and \
                    find_homomorphism_violation(images, e1.total, e2.total) is None:
                logger.debug("equivalence %s -> %s with theta %s", e1.total.name, e2.total.name, theta)
                return theta
    return None
