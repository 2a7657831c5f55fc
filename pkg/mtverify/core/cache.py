"""
Coefficient cache for mtverify

Stores the newform coefficients a_n of each curve and the q-expansion of j
as plain text under the cache directory, with warm, verify and purge
maintenance actions.
"""

import logging
import random
import threading
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from ..errors import CacheCorrupt
from .curve import CurveData, an_list, j_series


logger = logging.getLogger("mtverify")

J_SERIES_FILE = "j_series.txt"


class CoefficientCache:
    """On-disk store of a_n lists ('n a_n' lines) and j(q) coefficients"""

    def __init__(self, directory: Union[str, Path], verify_fraction: float = 0.01, seed: int = 0):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.verify_fraction = verify_fraction
        self.seed = seed
        self._lock = threading.RLock()

    @classmethod
    def from_config(cls, cache_config: Dict) -> "CoefficientCache":
        return cls(cache_config['directory'], cache_config['verify_fraction'], cache_config['seed'])

    def an_path(self, curve: CurveData) -> Path:
        return self.directory / f"{curve.label}.an"

    def _header(self, curve: CurveData) -> List[str]:
        return [
            f"# curve: {curve.label}",
            f"# a: {','.join(str(a) for a in curve.a_invariants)}",
        ]

    def read_an(self, curve: CurveData) -> Optional[Tuple[int, ...]]:
        """
        Cached a_0, ..., a_B, or None on a cache miss

        Raises:
            CacheCorrupt: If the file belongs to another model or is malformed
        """
        path = self.an_path(curve)
        with self._lock:
            if not path.exists():
                logger.debug(f"a_n cache miss for {curve.label}")
                return None
            lines = path.read_text().splitlines()
        header = [line for line in lines if line.startswith("#")]
        if header != self._header(curve):
            raise CacheCorrupt(f"cache file {path} does not belong to {curve.label} {list(curve.a_invariants)}")
        values: List[int] = [0]
        for line in lines:
            if line.startswith("#") or not line.strip():
                continue
            try:
                n, a_n = (int(x) for x in line.split())
            except ValueError:
                raise CacheCorrupt(f"malformed line in {path}: {line!r}")
            if n != len(values):
                raise CacheCorrupt(f"{path}: expected index {len(values)}, found {n}")
            values.append(a_n)
        return tuple(values)

    def write_an(self, curve: CurveData, coefficients: Tuple[int, ...]) -> Path:
        path = self.an_path(curve)
        lines = self._header(curve) + [f"{n} {coefficients[n]}" for n in range(1, len(coefficients))]
        with self._lock:
            path.write_text("\n".join(lines) + "\n")
        logger.debug(f"wrote {len(coefficients) - 1} coefficients of {curve.label} to {path}")
        return path

    def an_list(self, curve: CurveData, bound: int) -> Tuple[int, ...]:
        """a_0, ..., a_bound from the cache, extending it on a miss"""
        cached = self.read_an(curve)
        if cached is not None and len(cached) > bound:
            return cached[:bound + 1]
        coefficients = an_list(curve, bound)
        self.write_an(curve, coefficients)
        return coefficients

    def j_coefficients(self, terms: int) -> Tuple[int, ...]:
        """Coefficients of q^-1, q^0, ... of j(q), at least 'terms' of them"""
        path = self.directory / J_SERIES_FILE
        with self._lock:
            if path.exists():
                try:
                    cached = tuple(int(x) for x in path.read_text().split())
                except ValueError:
                    raise CacheCorrupt(f"malformed j-series cache {path}")
                if len(cached) >= terms:
                    return cached[:terms]
            coefficients = j_series(terms)
            path.write_text("\n".join(str(c) for c in coefficients) + "\n")
        logger.debug(f"j-series cache extended to {terms} terms")
        return coefficients

    def warm(self, curve: CurveData, bound: int, j_terms: int = 0) -> Path:
        """Populate a_n up to bound (and the j-series when j_terms > 0)"""
        logger.info(f"=== Warming cache for {curve.label} up to n = {bound} ===")
        self.write_an(curve, an_list(curve, bound))
        if j_terms:
            self.j_coefficients(j_terms)
        return self.an_path(curve)

    def verify(self, curve: CurveData) -> int:
        """
        Recompute a random sample of the cached a_n

        Returns:
            Number of coefficients compared

        Raises:
            CacheCorrupt: On any mismatch, or if nothing is cached
        """
        cached = self.read_an(curve)
        if cached is None:
            raise CacheCorrupt(f"nothing cached for {curve.label}")
        bound = len(cached) - 1
        fresh = an_list(curve, bound)
        size = max(1, round(bound * self.verify_fraction))
        sample = sorted(random.Random(self.seed).sample(range(1, bound + 1), min(size, bound)))
        mismatched = [n for n in sample if cached[n] != fresh[n]]
        if mismatched:
            raise CacheCorrupt(
                f"cached a_n of {curve.label} disagree at n = {mismatched[:10]}"
            )
        logger.info(f"verified {len(sample)} cached coefficients of {curve.label}")
        return len(sample)

    def purge(self, curve: Optional[CurveData] = None) -> int:
        """Delete the cache of one curve, or every cache file; returns the count removed"""
        with self._lock:
            if curve is not None:
                targets = [self.an_path(curve)]
            else:
                targets = list(self.directory.glob("*.an")) + [self.directory / J_SERIES_FILE]
            removed = 0
            for path in targets:
                if path.exists():
                    path.unlink()
                    removed += 1
        logger.info(f"purged {removed} cache file(s) from {self.directory}")
        return removed
