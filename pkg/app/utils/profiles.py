"""
Signal-profile and receiver-subset helpers.

Profiles are tuples of symbol indices, one per receiver (receiver i at
position i - 1). Receiver subsets are int bitmasks with bit i - 1 set for
receiver i. Lexicographic profile order is the order of itertools.product.
"""

from itertools import combinations, product
from typing import Iterable, Iterator, Sequence, Tuple

Profile = Tuple[int, ...]

BINARY_ALPHABET: Tuple[str, str] = ("0", "1")


def all_profiles(sizes: Sequence[int]) -> Iterator[Profile]:
    """Every profile over the given alphabet sizes, lexicographic order."""
    return product(*(range(size) for size in sizes))


def binary_profiles(n: int) -> Iterator[Profile]:
    return product((0, 1), repeat=n)


def profile_count(sizes: Sequence[int]) -> int:
    total = 1
    for size in sizes:
        total *= size
    return total


def prefix_profile(n: int, length: int) -> Profile:
    """The binary profile of prefix [length] (1 for receivers 1..length)."""
    return (1,) * length + (0,) * (n - length)


def prefix_length(profile: Profile) -> int:
    """Length of [j] if the binary profile is a prefix, else -1."""
    length = 0
    for symbol in profile:
        if symbol != 1:
            break
        length += 1
    if any(profile[length:]):
        return -1
    return length


def mask_of(profile: Profile) -> int:
    """Bitmask of receivers whose binary symbol is 1."""
    mask = 0
    for index, symbol in enumerate(profile):
        if symbol:
            mask |= 1 << index
    return mask


def mask_from_receivers(receivers: Iterable[int]) -> int:
    """Bitmask from 0-based receiver indices."""
    mask = 0
    for index in receivers:
        mask |= 1 << index
    return mask


def members(mask: int) -> Iterator[int]:
    """0-based receiver indices in the mask, increasing."""
    index = 0
    while mask:
        if mask & 1:
            yield index
        mask >>= 1
        index += 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> Iterator[int]:
    """Every subset of the mask, the mask itself first and 0 last."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def leak_sets(others: Sequence[int], max_size: int) -> Iterator[Tuple[int, ...]]:
    """Subsets of `others` by increasing size, lexicographic within a size."""
    for size in range(0, max_size + 1):
        yield from combinations(others, size)


def encode_profile(profile: Profile, alphabets: Sequence[Sequence[str]]) -> str:
    return "".join(alphabets[index][symbol] for index, symbol in enumerate(profile))


def decode_profile(text: str, alphabets: Sequence[Sequence[str]]) -> Profile:
    """
    Parse a profile string over single-character symbol names.

    Raises:
        ValueError: wrong length or a symbol outside the receiver's alphabet
    """
    if len(text) != len(alphabets):
        raise ValueError(f"profile {text!r} has length {len(text)}, expected {len(alphabets)}")
    decoded = []
    for index, char in enumerate(text):
        try:
            decoded.append(alphabets[index].index(char))
        except ValueError:
            raise ValueError(
                f"profile {text!r}: symbol {char!r} not in alphabet of receiver {index + 1}"
            ) from None
    return tuple(decoded)
