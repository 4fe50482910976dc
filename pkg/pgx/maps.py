import logging
import math
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pgx.core import UNIT, PartialGroup, Word, canonical
from pgx.errors import InternalError, MalformedWordError, StructuralError, UndefinedProductError, VerificationError
from pgx.utils import AUTOMORPHISM_CAP, check_cap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Homomorphism:
    source: PartialGroup
    target: PartialGroup
    images: Tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.images[x]

    def apply(self, w: Iterable[int]) -> Word:
        return tuple(self.images[x] for x in w)

    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """self after other."""
        if other.target is not self.source:
            raise StructuralError("homomorphisms are not composable")
        return Homomorphism(other.source, self.target, tuple(self.images[x] for x in other.images))

    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and sorted(self.images) == list(range(self.target.size))

    def inverse(self) -> "Homomorphism":
        if not self.is_bijective():
            raise StructuralError("only bijections have an inverse")
        images = [0] * len(self.images)
        for x, y in enumerate(self.images):
            images[y] = x
        return Homomorphism(self.target, self.source, tuple(images))


def identity(p: PartialGroup) -> Homomorphism:
    return Homomorphism(p, p, tuple(range(p.size)))


def find_homomorphism_violation(images: Sequence[int], source: PartialGroup, target: PartialGroup) \
        -> Optional[Word]:
    """First source word whose image breaks the homomorphism conditions, or None."""
    if len(images) != source.size:
        raise MalformedWordError(f"map covers {len(images)} of {source.size} elements of {source.name}")
    if any(not 0 <= y < target.size for y in images):
        raise MalformedWordError(f"map leaves the elements of {target.name}")
    if images[UNIT] != UNIT:
        return ()
    for x in range(1, source.size):
        if images[source.inv(x)] != target.inv(images[x]):
            return (x,)
    for w in source.words():
        if len(w) < 2:
            continue
        value = target.try_pi(tuple(images[x] for x in w))
        if value is None or value != images[source.try_pi(w)]:
            return w
    return None


def check_homomorphism(images: Sequence[int], source: PartialGroup, target: PartialGroup) -> Homomorphism:
    witness = find_homomorphism_violation(images, source, target)
    if witness is not None:
        raise VerificationError(f"not a homomorphism {source.name} -> {target.name}: fails at "
                                f"{source.word_str(witness)}", witness=witness)
    return Homomorphism(source, target, tuple(images))


@dataclass(frozen=True)
class Homotopy:
    """f <-eta- g: eta.g(x) = f(x).eta together with the prism words."""
    f: Homomorphism
    g: Homomorphism
    eta: int

    def prism(self, x: Word) -> List[Word]:
        return [self.f.apply(x[:k]) + (self.eta,) + self.g.apply(x[k:]) for k in range(len(x) + 1)]


def find_homotopy_violation(f: Homomorphism, g: Homomorphism, eta: int) -> Optional[Tuple[Word, int]]:
    if f.source is not g.source or f.target is not g.target:
        raise StructuralError("homotopic maps must share source and target")
    target = f.target
    for x in f.source.words(target.level - 1):
        expected = None
        for k in range(len(x) + 1):
            value = target.try_pi(f.apply(x[:k]) + (eta,) + g.apply(x[k:]))
            if value is None:
                return x, k
            if expected is None:
                expected = value
            elif value != expected:
                return x, k
    return None


def check_homotopy(f: Homomorphism, g: Homomorphism, eta: int) -> Homotopy:
    witness = find_homotopy_violation(f, g, eta)
    if witness is not None:
        word, k = witness
        raise VerificationError(f"{f.target.names[eta]} is not a homotopy: fails at {f.source.word_str(word)}, k={k}",
                                witness=witness)
    return Homotopy(f, g, eta)


def _reverified(f: Homomorphism, g: Homomorphism, eta: int) -> Homotopy:
    try:
        return check_homotopy(f, g, eta)
    except VerificationError as e:
        raise InternalError(f"homotopy algebra produced an invalid homotopy: {e}", witness=e.witness)


def invert_homotopy(h: Homotopy) -> Homotopy:
    return _reverified(h.g, h.f, h.f.target.inv(h.eta))


def precompose(h: Homotopy, j: Homomorphism) -> Homotopy:
    return _reverified(h.f.compose(j), h.g.compose(j), h.eta)


def postcompose(k: Homomorphism, h: Homotopy) -> Homotopy:
    return _reverified(k.compose(h.f), k.compose(h.g), k(h.eta))


def paste(h: Homotopy, h2: Homotopy) -> Homotopy:
    """From f <-eta- g and i <-nu- j, the homotopy f.i <-eta.g(nu)- g.j."""
    try:
        label = h.f.target.mul(h.eta, h.g(h2.eta))
    except UndefinedProductError as e:
        raise InternalError(f"pasted label undefined: {e}", witness=e.witness)
    return _reverified(h.f.compose(h2.f), h.g.compose(h2.g), label)


@dataclass
class Normalizer:
    partial_group: PartialGroup
    elements: Tuple[int, ...]
    conjugations: Dict[int, Homomorphism]
    exact: bool
    rejected: Dict[int, Word] = field(default_factory=dict)

    def __contains__(self, x: int) -> bool:
        return x in self.conjugations

    def conjugation(self, eta: int) -> Homomorphism:
        try:
            return self.conjugations[eta]
        except KeyError:
            raise StructuralError(f"{self.partial_group.names[eta]} is not in the normalizer")


def _insertion_witness(p: PartialGroup, eta: int, words: Sequence[Word]) -> Optional[Word]:
    pair = (eta, p.inv(eta))
    for x in words:
        for k in range(len(x) + 1):
            w = canonical(x[:k] + pair + x[k:])
            if len(w) >= 2 and w not in p.domain:
                return x
    return None


def normalizer(p: PartialGroup) -> Normalizer:
    """Elements whose pair [eta|eta^-1] splices into every word with headroom 2, with their conjugations."""
    words = list(p.words(p.level - 2))
    conjugations: Dict[int, Homomorphism] = {}
    rejected: Dict[int, Word] = {}
    for eta in range(p.size):
        witness = _insertion_witness(p, eta, words)
        if witness is not None:
            rejected[eta] = witness
            continue
        images = [p.try_pi((eta, x, p.inv(eta))) for x in range(p.size)]
        if any(y is None for y in images):
            rejected[eta] = next((x,) for x, y in enumerate(images) if y is None)
            continue
        c = Homomorphism(p, p, tuple(images))
        witness = find_homomorphism_violation(c.images, p, p)
        if witness is None:
            pair_witness = find_homotopy_violation(c, identity(p), eta)
            witness = pair_witness[0] if pair_witness is not None else None
        if witness is not None:
            rejected[eta] = witness
            continue
        conjugations[eta] = c
    logger.debug("%s: normalizer has %d of %d elements", p.name, len(conjugations), p.size)
    return Normalizer(p, tuple(sorted(conjugations)), conjugations, p.complete, rejected)


def center(p: PartialGroup, n: Optional[Normalizer] = None) -> Tuple[int, ...]:
    n = n or normalizer(p)
    ident = tuple(range(p.size))
    return tuple(eta for eta in n.elements if n.conjugations[eta].images == ident)


def _power_signature(p: PartialGroup, x: int) -> Tuple[int, bool]:
    k, acc = 1, x
    while acc != UNIT and k <= p.size:
        nxt = p.try_pi((acc, x))
        if nxt is None:
            return k, False
        acc = nxt
        k += 1
    return k, acc == UNIT


def _extends(p: PartialGroup, images: Dict[int, int], x: int) -> bool:
    for a, b in [(x, y) for y in images] + [(y, x) for y in images if y != x]:
        fa, fb = images[a], images[b]
        source_value = p.try_pi((a, b))
        target_value = p.try_pi((fa, fb))
        if (source_value is None) != (target_value is None):
            return False
        if source_value is not None and source_value in images and images[source_value] != target_value:
            return False
    return True


def _search_automorphisms(p: PartialGroup) -> List[Homomorphism]:
    signature = [_power_signature(p, x) for x in range(p.size)]
    found: List[Homomorphism] = []
    images: Dict[int, int] = {UNIT: UNIT}
    used = {UNIT}

    def extend(x: int):
        if x == p.size:
            ordered = tuple(images[y] for y in range(p.size))
            if find_homomorphism_violation(ordered, p, p) is None:
                found.append(Homomorphism(p, p, ordered))
            return
        for y in range(1, p.size):
            if y in used or signature[y] != signature[x]:
                continue
            x_inv = p.inv(x)
            if x_inv == x and p.inv(y) != y:
                continue
            if x_inv in images and images[x_inv] != p.inv(y):
                continue
            images[x] = y
            used.add(y)
            if _extends(p, images, x):
                extend(x + 1)
            del images[x]
            used.discard(y)

    extend(1)
    return found


class AutData:
    """Automorphisms of a partial group with N, Z, conjugation and the Out cosets."""

    def __init__(self, p: PartialGroup, automorphisms: List[Homomorphism], n: Normalizer):
        self._p = p
        self._auts = automorphisms
        self._index = {a.images: i for i, a in enumerate(automorphisms)}
        if not automorphisms or automorphisms[0].images != tuple(range(p.size)):
            raise InternalError(f"{p.name}: identity must be the first automorphism")
        self._comp = [[self._index[a.compose(b).images] for b in automorphisms] for a in automorphisms]
        self._inverse = [self._index[a.inverse().images] for a in automorphisms]
        self._n = n
        self._center = center(p, n)
        try:
            self._conj = {eta: self._index[c.images] for eta, c in n.conjugations.items()}
        except KeyError:
            raise InternalError(f"{p.name}: a conjugation is missing from the automorphisms")
        self._inner = tuple(sorted(set(self._conj.values())))
        self._out_classes: List[Tuple[int, ...]] = []
        self._out_of = [-1] * len(automorphisms)
        for i in range(len(automorphisms)):
            if self._out_of[i] < 0:
                coset = tuple(sorted({self._comp[i][j] for j in self._inner}))
                for k in coset:
                    self._out_of[k] = len(self._out_classes)
                self._out_classes.append(coset)
        self._check()

    def _check(self):
        n, z = self._n.elements, self._center
        if len(self._auts) * len(z) != len(n) * len(self._out_classes):
            raise InternalError(f"{self._p.name}: |Aut|.|Z| = {len(self._auts) * len(z)} but "
                                f"|N|.|Out| = {len(n) * len(self._out_classes)}")
        members = set(n)
        for eta in n:
            if self._p.inv(eta) not in members or self._conj[self._p.inv(eta)] != self._inverse[self._conj[eta]]:
                raise InternalError(f"{self._p.name}: conjugation by the inverse of {self._p.names[eta]} is wrong")
            for mu in n:
                product = self._p.try_pi((eta, mu))
                if product not in members or self._conj[product] != self._comp[self._conj[eta]][self._conj[mu]]:
                    raise InternalError(f"{self._p.name}: conjugation is not multiplicative on N")
        for a in self._auts:
            if {a(x) for x in n} != members or {a(x) for x in z} != set(z):
                raise InternalError(f"{self._p.name}: N or Z is not characteristic")

    @property
    def partial_group(self) -> PartialGroup:
        return self._p

    @property
    def automorphisms(self) -> List[Homomorphism]:
        return list(self._auts)

    @property
    def composition_table(self) -> List[List[int]]:
        return [list(row) for row in self._comp]

    @property
    def normalizer(self) -> Tuple[int, ...]:
        return self._n.elements

    @property
    def normalizer_data(self) -> Normalizer:
        return self._n

    @property
    def center(self) -> Tuple[int, ...]:
        return self._center

    @property
    def conj_map(self) -> Dict[int, int]:
        return dict(self._conj)

    @property
    def inner(self) -> Tuple[int, ...]:
        return self._inner

    @property
    def out_classes(self) -> List[Tuple[int, ...]]:
        return list(self._out_classes)

    @property
    def exact(self) -> bool:
        return self._n.exact

    def __len__(self) -> int:
        return len(self._auts)

    def __getitem__(self, i: int) -> Homomorphism:
        return self._auts[i]

    def index_of(self, images: Sequence[int]) -> int:
        try:
            return self._index[tuple(images)]
        except KeyError:
            raise StructuralError(f"{self._p.name}: {list(images)} is not an automorphism")

    def compose(self, i: int, j: int) -> int:
        return self._comp[i][j]

    def inverse(self, i: int) -> int:
        return self._inverse[i]

    def apply(self, i: int, x: int) -> int:
        return self._auts[i].images[x]

    def conjugation(self, eta: int) -> int:
        try:
            return self._conj[eta]
        except KeyError:
            raise StructuralError(f"{self._p.names[eta]} is not in N({self._p.name})")

    def out_class_of(self, i: int) -> int:
        return self._out_of[i]

    def out_multiply(self, c: int, d: int) -> int:
        return self._out_of[self._comp[self._out_classes[c][0]][self._out_classes[d][0]]]

    def mul(self, eta: int, mu: int) -> int:
        """Product in the group N."""
        return self._p.mul(eta, mu)

    def is_morphism(self, alpha: int, eta: int, beta: int) -> bool:
        return eta in self._conj and alpha == self._comp[self._conj[eta]][beta]


def automorphisms(p: PartialGroup, cap: int = AUTOMORPHISM_CAP) -> AutData:
    check_cap(f"automorphisms of {p.name}", math.factorial(max(p.size - 1, 0)), cap)
    n = normalizer(p)
    found = _search_automorphisms(p)
    logger.debug("%s: %d automorphisms", p.name, len(found))
    return AutData(p, found, n)


@dataclass(frozen=True)
class NerveSimplex:
    """A chain alpha_0 <-eta_1- alpha_1 ... <-eta_n- alpha_n of automorphism indices and N-labels."""
    objects: Tuple[int, ...]
    labels: Tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.objects) - 1


def check_simplex(aut: AutData, s: NerveSimplex) -> bool:
    if len(s.labels) != s.dimension:
        return False
    return all(aut.is_morphism(s.objects[i], s.labels[i], s.objects[i + 1]) for i in range(s.dimension))


def nerve_identity(aut: AutData, n: int) -> NerveSimplex:
    return NerveSimplex((0,) * (n + 1), (UNIT,) * n)


def nerve_face(aut: AutData, s: NerveSimplex, i: int) -> NerveSimplex:
    n = s.dimension
    if n < 1 or not 0 <= i <= n:
        raise IndexError(f"face d_{i} undefined on a {n}-simplex")
    objects = s.objects[:i] + s.objects[i + 1:]
    if i == 0:
        labels = s.labels[1:]
    elif i == n:
        labels = s.labels[:-1]
    else:
        labels = s.labels[:i - 1] + (aut.mul(s.labels[i - 1], s.labels[i]),) + s.labels[i + 1:]
    return NerveSimplex(objects, labels)


def nerve_degeneracy(aut: AutData, s: NerveSimplex, i: int) -> NerveSimplex:
    if not 0 <= i <= s.dimension:
        raise IndexError(f"degeneracy s_{i} undefined on a {s.dimension}-simplex")
    return NerveSimplex(s.objects[:i + 1] + s.objects[i:], s.labels[:i] + (UNIT,) + s.labels[i:])


def nerve_product(aut: AutData, s: NerveSimplex, t: NerveSimplex) -> NerveSimplex:
    if s.dimension != t.dimension:
        raise StructuralError("simplices of different dimensions")
    objects = tuple(aut.compose(a, b) for a, b in zip(s.objects, t.objects))
    labels = tuple(aut.mul(eta, aut.apply(s.objects[i + 1], mu)) for i, (eta, mu) in enumerate(zip(s.labels, t.labels)))
    return NerveSimplex(objects, labels)


def nerve_inverse(aut: AutData, s: NerveSimplex) -> NerveSimplex:
    p = aut.partial_group
    objects = tuple(aut.inverse(a) for a in s.objects)
    labels = tuple(aut.apply(aut.inverse(s.objects[i + 1]), p.inv(eta)) for i, eta in enumerate(s.labels))
    return NerveSimplex(objects, labels)


def find_tensor_violation(aut: AutData) -> Optional[Tuple[NerveSimplex, NerveSimplex]]:
    """1-simplices where eta.beta(eta') and alpha(eta').eta disagree."""
    edges = aut_nerve(aut, 1, verify=False)
    for s in edges:
        alpha, beta = s.objects
        eta = s.labels[0]
        for t in edges:
            mu = t.labels[0]
            if aut.mul(eta, aut.apply(beta, mu)) != aut.mul(aut.apply(alpha, mu), eta):
                return s, t
    return None


def aut_nerve(aut: AutData, n: int, verify: bool = True) -> List[NerveSimplex]:
    if n < 0:
        raise IndexError("nerve dimension must be non-negative")
    if verify and n >= 1:
        witness = find_tensor_violation(aut)
        if witness is not None:
            raise InternalError("tensor interchange fails on the automorphism nerve", witness=witness)
    simplices = []
    for last in range(len(aut)):
        for labels in cartesian(aut.normalizer, repeat=n):
            objects = [last]
            for eta in reversed(labels):
                objects.append(aut.compose(aut.conjugation(eta), objects[-1]))
            simplices.append(NerveSimplex(tuple(reversed(objects)), tuple(labels)))
    return sorted(simplices, key=lambda s: (s.objects, s.labels))


@dataclass(frozen=True)
class PiReport:
    out_order: int
    out_classes: Tuple[Tuple[int, ...], ...]
    center: Tuple[int, ...]
    higher: int = 0
    exact: bool = False

    @property
    def pi0(self) -> int:
        return self.out_order

    @property
    def pi1(self) -> int:
        return len(self.center)


def pi_report(aut: AutData) -> PiReport:
    return PiReport(len(aut.out_classes), tuple(aut.out_classes), aut.center, 0, aut.exact)
