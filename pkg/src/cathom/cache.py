"""Content-addressed disk cache with atomic writes.

Keys are hex digests; values are JSON documents.  Writes go through a
temporary file in the same directory followed by os.replace, so readers
never see partial content.  Format-versioned: the version participates
in every key.
"""

from __future__ import annotations

import json
import os
import tempfile

from .catmod import CatModule
from .fincat import FiniteCategory
from .matrix import Matrix
from .resolve import Resolution, free_resolution
from .serialize import content_hash

CACHE_FORMAT = "cathom-cache-v1"


class DiskCache:
    def __init__(self, directory: str):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    def _path(self, key: str) -> str:
        return os.path.join(self.directory, key + ".json")

    def get(self, key: str):
        try:
            with open(self._path(key)) as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None

    def put(self, key: str, payload) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(payload, fh, sort_keys=True)
            os.replace(tmp, self._path(key))
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


def resolution_to_json(res: Resolution) -> dict:
    gen_images = []
    for k in range(1, res.length + 1):
        level = []
        for sparse in res.gen_images[k]:
            level.append(
                [[j, psi, res.ring.entry_to_json(c)] for (j, psi), c in sorted(sparse.items())]
            )
        gen_images.append(level)
    return {
        "levels": [list(lvl.summands) for lvl in res.levels],
        "aug": [[res.ring.entry_to_json(x) for x in v] for v in res.aug_images],
        "gen_images": gen_images,
    }


def resolution_from_json(M: CatModule, d: dict) -> Resolution:
    from .catmod import FreeCatModule

    res = Resolution(M)
    ring = M.ring
    res.levels = [
        FreeCatModule(M.cat, ring, M.variance, summands) for summands in d["levels"]
    ]
    res.aug_images = [[ring.entry_from_json(x) for x in v] for v in d["aug"]]
    res.gen_images = [[]]
    for level in d["gen_images"]:
        out = []
        for terms in level:
            out.append({(j, psi): ring.entry_from_json(c) for j, psi, c in terms})
        res.gen_images.append(out)
    return res


def cached_free_resolution(M: CatModule, length: int, cache: DiskCache | None,
                           cat_json: dict | None = None,
                           module_json: dict | None = None) -> Resolution:
    """free_resolution with an optional content-addressed disk cache."""
    if cache is None:
        return free_resolution(M, length)
    from .serialize import category_to_json, module_to_json

    key = content_hash({
        "format": CACHE_FORMAT,
        "kind": "resolution",
        "category": cat_json if cat_json is not None else category_to_json(M.cat),
        "module": module_json if module_json is not None else module_to_json(M),
        "length": length,
    })
    hit = cache.get(key)
    if hit is not None:
        return resolution_from_json(M, hit)
    res = free_resolution(M, length)
    cache.put(key, resolution_to_json(res))
    return res
