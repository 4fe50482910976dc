import logging
from dataclasses import dataclass
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Tuple

from pgx.core import UNIT, PartialGroup, Word
from pgx.errors import ActionError, InternalError, StructuralError, UndefinedProductError, VerificationError
from pgx.extensions import Extension, semidirect
from pgx.maps import AutData, Homomorphism, check_homomorphism, check_homotopy, find_homomorphism_violation, \
    find_homotopy_violation, normalizer
from pgx.utils import SEARCH_CAP, UnionFind, check_cap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Section:
    extension: Extension
    sigma: Homomorphism
    theta: Tuple[int, ...]
    regular: bool


def _section(extension: Extension, theta: Sequence[int], sigma: Homomorphism) -> Section:
    n = extension.pair.aut.normalizer_data
    return Section(extension, sigma, tuple(theta), all(x in n for x in theta))


def find_sections(extension: Extension, cap: int = SEARCH_CAP) -> List[Section]:
    """Every sigma(g) = (theta(g), g) that is a homomorphism, theta in lexicographic order."""
    fiber, base, total = extension.fiber, extension.base, extension.total
    check_cap(f"sections of {total.name}", fiber.size ** max(base.size - 1, 0), cap)
    found = []
    for rest in cartesian(range(fiber.size), repeat=base.size - 1):
        theta = (UNIT,) + rest
        images = tuple(extension.letter(theta[g], g) for g in range(base.size))
        if find_homomorphism_violation(images, base, total) is None:
            found.append(_section(extension, theta, Homomorphism(base, total, images)))
    logger.debug("%s: %d sections", total.name, len(found))
    return found


@dataclass(frozen=True)
class Derivation:
    base: PartialGroup
    aut: AutData
    rho: Tuple[int, ...]
    theta: Tuple[int, ...]
    regular: bool


def _twist(base: PartialGroup, aut: AutData, rho: Sequence[int], w: Word, length: int, x: int) -> int:
    """^{h1...h_length} x for the first letters of w."""
    return aut.apply(rho[base.pi(w[:length])], x)


def derivation_word(base: PartialGroup, aut: AutData, rho: Sequence[int], theta: Sequence[int], w: Word) -> Word:
    """[theta(h1)|^{h1}theta(h2)|...|^{h1...h_{n-1}}theta(hn)]"""
    return tuple(_twist(base, aut, rho, w, j, theta[h]) for j, h in enumerate(w))


def find_derivation_violation(base: PartialGroup, aut: AutData, rho: Sequence[int], theta: Sequence[int]) \
        -> Optional[Word]:
    fiber = aut.partial_group
    if len(theta) != base.size or theta[UNIT] != UNIT:
        return ()
    for w in base.words(min(base.level, fiber.level)):
        if not w:
            continue
        word = derivation_word(base, aut, rho, theta, w)
        if not fiber.member(word):
            return w
        if len(w) == 2 and fiber.try_pi(word) != theta[base.mul(*w)]:
            return w
    return None


def check_derivation(base: PartialGroup, aut: AutData, rho: Sequence[int], theta: Sequence[int]) -> Derivation:
    witness = find_derivation_violation(base, aut, rho, theta)
    if witness is not None:
        raise VerificationError(f"not a derivation {base.name} -> {aut.partial_group.name}: fails at "
                                f"{base.word_str(witness)}", witness=witness)
    n = aut.normalizer_data
    return Derivation(base, aut, tuple(rho), tuple(theta), all(x in n for x in theta))


def derivations(base: PartialGroup, aut: AutData, rho: Sequence[int], cap: int = SEARCH_CAP) -> List[Derivation]:
    fiber = aut.partial_group
    check_cap(f"derivations {base.name} -> {fiber.name}", fiber.size ** max(base.size - 1, 0), cap)
    found = []
    for rest in cartesian(range(fiber.size), repeat=base.size - 1):
        theta = (UNIT,) + rest
        if find_derivation_violation(base, aut, rho, theta) is None:
            found.append(check_derivation(base, aut, rho, theta))
    return found


def _semidirect_presentation(extension: Extension):
    if extension.pair.eta:
        raise StructuralError(f"{extension.total.name} is not presented as a semidirect product; "
                              f"normalize it with a regular section first")


def section_to_derivation(section: Section) -> Derivation:
    extension = section.extension
    _semidirect_presentation(extension)
    pair = extension.pair
    return check_derivation(pair.base, pair.aut, pair.t, section.theta)


def derivation_to_section(derivation: Derivation, extension: Extension) -> Section:
    _semidirect_presentation(extension)
    pair = extension.pair
    if derivation.aut is not pair.aut or derivation.rho != pair.t:
        raise StructuralError(f"derivation acts differently from {extension.total.name}")
    images = [extension.letter(derivation.theta[g], g) for g in range(pair.base.size)]
    sigma = check_homomorphism(images, pair.base, extension.total)
    return _section(extension, derivation.theta, sigma)


def check_derivation_equivalence(derivation: Derivation, other: Derivation, y: int) -> bool:
    """Whether y carries derivation to other: every v_k word is a member and all share one product."""
    base, aut, rho = derivation.base, derivation.aut, derivation.rho
    fiber = aut.partial_group
    theta, theta2 = derivation.theta, other.theta
    for h in range(1, base.size):
        lhs = fiber.try_pi((y, theta2[h]))
        if lhs is None or lhs != fiber.try_pi((theta[h], aut.apply(rho[h], y))):
            return False
    for w in base.words(fiber.level - 1):
        if len(w) < 2:
            continue
        products = set()
        for k in range(len(w) + 1):
            v = tuple(_twist(base, aut, rho, w, j, theta[h]) for j, h in enumerate(w[:k])) \
                + (_twist(base, aut, rho, w, k, y),) \
                + tuple(_twist(base, aut, rho, w, j, theta2[w[j]]) for j in range(k, len(w)))
            value = fiber.try_pi(v)
            if value is None:
                return False
            products.add(value)
        if len(products) > 1:
            return False
    return True


@dataclass
class H1Result:
    derivations: List[Derivation]
    classes: List[List[int]]

    def __len__(self) -> int:
        return len(self.classes)

    def class_of(self, theta: Sequence[int]) -> int:
        theta = tuple(theta)
        for i, members in enumerate(self.classes):
            if any(self.derivations[j].theta == theta for j in members):
                return i
        raise StructuralError(f"{list(theta)} is not a derivation")


def h1_nonabelian(base: PartialGroup, aut: AutData, rho: Sequence[int], cap: int = SEARCH_CAP) -> H1Result:
    """Derivations modulo the equivalence generated by the v_k relation."""
    found = derivations(base, aut, rho, cap)
    fiber = aut.partial_group
    components = UnionFind(range(len(found)))
    for i, d in enumerate(found):
        for j, other in enumerate(found):
            if i != j and components.find(i) != components.find(j) and \
                    any(check_derivation_equivalence(d, other, y) for y in range(fiber.size)):
                components.union(i, j)
    classes = components.classes()
    logger.debug("H1(%s; %s): %d derivations, %d classes", base.name, fiber.name, len(found), len(classes))
    return H1Result(found, classes)


@dataclass
class RegularSplit:
    rho: Tuple[int, ...]
    semidirect: Extension
    phi: Homomorphism
    phi_inverse: Homomorphism


def regular_split_normalize(extension: Extension, section: Section) -> RegularSplit:
    """rho(g) = c_theta(g) . t(g) and the equivalence (x, g) -> (x.theta(g), g) from the semidirect product."""
    if not section.regular:
        raise StructuralError(f"section {list(section.theta)} of {extension.total.name} is not regular")
    pair, fiber, base = extension.pair, extension.fiber, extension.base
    aut, theta = pair.aut, section.theta
    rho = tuple(aut.compose(aut.conjugation(theta[g]), pair.t_of(g)) for g in range(base.size))
    try:
        split = semidirect(fiber, base, aut, rho)
    except ActionError as e:
        raise InternalError(f"conjugated action of {extension.total.name} is not an action: {e}", witness=e.witness)

    try:
        images = tuple(extension.letter(fiber.mul(x, theta[g]), g)
                       for g in range(base.size) for x in range(fiber.size))
        inverse_images = tuple(split.letter(fiber.mul(x, fiber.inv(theta[g])), g)
                               for g in range(base.size) for x in range(fiber.size))
    except UndefinedProductError as e:
        raise InternalError(f"{extension.total.name}: fiber coordinate shift undefined: {e}", witness=e.witness)
    phi = Homomorphism(split.total, extension.total, images)
    phi_inverse = Homomorphism(extension.total, split.total, inverse_images)

    for h in (phi, phi_inverse):
        witness = find_homomorphism_violation(h.images, h.source, h.target)
        if witness is not None:
            raise InternalError(f"{h.source.name} -> {h.target.name} is not a homomorphism at {witness}",
                                witness=witness)
    if phi.compose(phi_inverse).images != tuple(range(extension.total.size)):
        raise InternalError(f"{extension.total.name}: normalizing map is not invertible")
    if extension.tau.compose(phi).images != split.tau.images or phi.compose(split.iota).images != extension.iota.images:
        raise InternalError(f"{extension.total.name}: normalizing map is not an equivalence of extensions")
    if phi.compose(split.canonical_section).images != section.sigma.images:
        raise InternalError(f"{extension.total.name}: canonical section does not go to the regular section")
    return RegularSplit(rho, split, phi, phi_inverse)


@dataclass
class RegularSectionObstruction:
    solvable: bool
    theta: Optional[Tuple[int, ...]]


def regular_section_obstruction(extension: Extension, cap: int = SEARCH_CAP) -> RegularSectionObstruction:
    """Search theta: H -> N(M) with eta(g,h) = t(g)(theta(h)^-1).theta(g)^-1.theta(gh)."""
    pair, base = extension.pair, extension.base
    aut = pair.aut
    n = aut.normalizer
    check_cap(f"regular sections of {extension.total.name}", len(n) ** max(base.size - 1, 0), cap)
    inv = aut.partial_group.inv
    for rest in cartesian(n, repeat=base.size - 1):
        theta = (UNIT,) + rest
        if all(pair.eta_of(g, h) == aut.mul(aut.mul(pair.twist(g, inv(theta[h])), inv(theta[g])),
                                             theta[base.mul(g, h)])
               for g, h in base.domain_words(2)):
            return RegularSectionObstruction(True, theta)
    return RegularSectionObstruction(False, None)


@dataclass
class SectionClasses:
    sections: List[Section]
    classes: List[List[int]]
    h1: Optional[H1Result] = None
    to_h1: Optional[Dict[int, int]] = None

    def __len__(self) -> int:
        return len(self.classes)


def _fiber_homotopic(first: Section, second: Section) -> Optional[int]:
    extension = first.extension
    for y in range(extension.fiber.size):
        if find_homotopy_violation(first.sigma, second.sigma, extension.letter(y, UNIT)) is None:
            return y
    return None


def section_classes(extension: Extension, sections: Optional[List[Section]] = None,
                    cap: int = SEARCH_CAP) -> SectionClasses:
    """Sections modulo fiber-labelled homotopy; on regular split extensions matched against H1."""
    if sections is None:
        sections = find_sections(extension, cap)
    components = UnionFind(range(len(sections)))
    for i, first in enumerate(sections):
        for j, second in enumerate(sections):
            if i != j and components.find(i) != components.find(j) and _fiber_homotopic(first, second) is not None:
                components.union(i, j)
    result = SectionClasses(sections, components.classes())

    regular = next((s for s in sections if s.regular), None)
    if regular is None:
        return result
    split = regular_split_normalize(extension, regular)
    h1 = h1_nonabelian(extension.base, extension.pair.aut, split.rho, cap)
    if len(h1.derivations) != len(sections):
        raise InternalError(f"{extension.total.name}: {len(sections)} sections but {len(h1.derivations)} derivations")
    to_h1: Dict[int, int] = {}
    for index, members in enumerate(result.classes):
        targets = set()
        for i in members:
            moved = split.phi_inverse.compose(sections[i].sigma)
            theta = tuple(split.semidirect.coordinates(z)[0] for z in moved.images)
            targets.add(h1.class_of(section_to_derivation(_section(split.semidirect, theta, moved)).theta))
        if len(targets) != 1:
            raise InternalError(f"{extension.total.name}: section class {index} meets {len(targets)} H1 classes")
        to_h1[index] = targets.pop()
    if sorted(to_h1.values()) != list(range(len(h1))):
        raise InternalError(f"{extension.total.name}: section classes do not match H1")
    result.h1, result.to_h1 = h1, to_h1
    return result


@dataclass
class HomotopyChain:
    """sigma_0 <-x_1- sigma_1 <-x_2- ... <-x_n- sigma_n"""
    maps: Tuple[Homomorphism, ...]
    labels: Tuple[int, ...]


def _is_section(extension: Extension, sigma: Homomorphism) -> bool:
    return extension.tau.compose(sigma).images == tuple(range(extension.base.size))


def _check_chain(maps: Sequence[Homomorphism], labels: Sequence[int]):
    for i, x in enumerate(labels):
        check_homotopy(maps[i], maps[i + 1], x)


def normalize_homotopy_chain(extension: Extension, chain: HomotopyChain) -> HomotopyChain:
    """An equivalent chain of sections with fiber labels (x, 1) and the same endpoints."""
    maps, labels = list(chain.maps), list(chain.labels)
    if len(maps) != len(labels) + 1:
        raise VerificationError("a chain has one more map than labels")
    if not (_is_section(extension, maps[0]) and _is_section(extension, maps[-1])):
        raise VerificationError("chain endpoints must be sections")
    _check_chain(maps, labels)
    total, base, tau = extension.total, extension.base, extension.tau
    base_n = normalizer(base)

    def verified(step: str):
        try:
            _check_chain(maps, labels)
        except VerificationError as e:
            raise InternalError(f"chain normalization broke at {step}: {e}", witness=e.witness)

    try:
        for i in range(1, len(maps) - 1):
            g = tau(labels[i - 1])
            if g == UNIT:
                continue
            sigma = maps[i]
            maps[i] = sigma.compose(base_n.conjugation(g))
            shift = sigma(base.inv(g))
            labels[i - 1] = total.mul(labels[i - 1], shift)
            labels[i] = total.mul(total.inv(shift), labels[i])
            verified(f"map {i}")
        for i, x in enumerate(labels):
            g = tau(x)
            if g != UNIT:
                labels[i] = total.mul(x, maps[i + 1](base.inv(g)))
                verified(f"label {i + 1}")
    except UndefinedProductError as e:
        raise InternalError(f"chain normalization needs an undefined product: {e}", witness=e.witness)
    if any(not _is_section(extension, sigma) for sigma in maps) or any(tau(x) != UNIT for x in labels):
        raise InternalError("normalized chain is not made of sections with fiber labels")
    return HomotopyChain(tuple(maps), tuple(labels))
