"""Versioned on-disk snapshots.

Layout (little endian)::

    magic      8 bytes  b"SKGSNAP\\n"
    version    uint32
    hdr_len    uint32
    header     hdr_len bytes of UTF-8 JSON: doc count, generation, schema,
               and the dtype/offset/length of every payload array
    payload    raw arrays: external ids, then per field the term dictionary,
               postings (and positions), then per field the forward rows
    digest     32 bytes, SHA-256 of everything above

Writes go to a temporary file that is renamed into place.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .analysis import Schema
from .errors import SnapshotFormatError, SnapshotVersionError
from .index import FieldIndex, IndexSnapshot

MAGIC = b"SKGSNAP\n"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sII")
_DIGEST_LEN = 32


def _encode_strings(strings) -> tuple[np.ndarray, np.ndarray]:
    encoded = [s.encode("utf-8") for s in strings]
    offsets = np.zeros(len(encoded) + 1, dtype=np.int64)
    np.cumsum([len(b) for b in encoded], out=offsets[1:])
    return np.frombuffer(b"".join(encoded), dtype=np.uint8), offsets


def _decode_strings(blob: np.ndarray, offsets: np.ndarray) -> list[str]:
    raw = blob.tobytes()
    return [raw[offsets[i]:offsets[i + 1]].decode("utf-8") for i in range(len(offsets) - 1)]


def dumps(snapshot: IndexSnapshot) -> bytes:
    arrays: list[tuple[str, np.ndarray]] = []
    blob, offs = _encode_strings(snapshot.external_ids)
    arrays += [("ids.blob", blob), ("ids.offsets", offs)]
    for name, fi in snapshot.fields.items():
        tblob, toffs = _encode_strings(fi.terms)
        arrays += [(f"{name}.terms.blob", tblob), (f"{name}.terms.offsets", toffs),
                   (f"{name}.post_ptr", fi.post_ptr), (f"{name}.post_docs", fi.post_docs)]
        if fi.schema.positional:
            arrays += [(f"{name}.pos_ptr", fi.pos_ptr), (f"{name}.positions", fi.positions)]
    for name, fi in snapshot.fields.items():
        arrays += [(f"{name}.fwd_ptr", fi.fwd_ptr), (f"{name}.fwd_terms", fi.fwd_terms)]

    table = []
    offset = 0
    for key, arr in arrays:
        arr = np.ascontiguousarray(arr)
        table.append({"key": key, "dtype": arr.dtype.str, "length": int(arr.size),
                      "offset": offset})
        offset += arr.nbytes
    header = json.dumps({
        "doc_count": snapshot.doc_count,
        "generation": snapshot.generation,
        "schema": snapshot.schema.to_dict(),
        "fields": list(snapshot.fields),
        "arrays": table,
    }, sort_keys=True).encode("utf-8")
    body = b"".join([_PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)), header]
                    + [np.ascontiguousarray(a).tobytes() for _, a in arrays])
    return body + hashlib.sha256(body).digest()


def loads(data: bytes) -> IndexSnapshot:
    if len(data) < _PREFIX.size:
        raise SnapshotFormatError("file too short to be a snapshot")
    magic, version, hdr_len = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotFormatError("not a snapshot file (bad magic)")
    if version != FORMAT_VERSION:
        raise SnapshotVersionError(
            f"snapshot format version {version} is not supported (expected {FORMAT_VERSION})")
    if len(data) < _PREFIX.size + hdr_len + _DIGEST_LEN:
        raise SnapshotFormatError("snapshot is truncated")
    body, digest = data[:-_DIGEST_LEN], data[-_DIGEST_LEN:]
    if hashlib.sha256(body).digest() != digest:
        raise SnapshotFormatError("snapshot checksum mismatch (corrupt or truncated)")
    try:
        header = json.loads(body[_PREFIX.size:_PREFIX.size + hdr_len].decode("utf-8"))
        payload = memoryview(body)[_PREFIX.size + hdr_len:]
        arrays = {}
        for entry in header["arrays"]:
            dt = np.dtype(entry["dtype"])
            start = entry["offset"]
            stop = start + entry["length"] * dt.itemsize
            if stop > len(payload):
                raise SnapshotFormatError(f"array {entry['key']} runs past the payload")
            arrays[entry["key"]] = np.frombuffer(payload[start:stop], dtype=dt).copy()
        schema = Schema.from_dict(header["schema"])
        n_docs = header["doc_count"]
        ids = _decode_strings(arrays["ids.blob"], arrays["ids.offsets"])
        fields = {}
        for name in header["fields"]:
            fs = schema.get(name)
            terms = _decode_strings(arrays[f"{name}.terms.blob"], arrays[f"{name}.terms.offsets"])
            fields[name] = FieldIndex(
                fs, n_docs, terms,
                arrays[f"{name}.post_ptr"], arrays[f"{name}.post_docs"],
                arrays[f"{name}.fwd_ptr"], arrays[f"{name}.fwd_terms"],
                arrays.get(f"{name}.pos_ptr"), arrays.get(f"{name}.positions"),
            )
    except SnapshotFormatError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise SnapshotFormatError(f"malformed snapshot: {exc}") from exc
    if len(ids) != n_docs:
        raise SnapshotFormatError("document count does not match id table")
    return IndexSnapshot(schema, ids, fields, header.get("generation", 0))


def save_snapshot(snapshot: IndexSnapshot, path) -> Path:
    path = Path(path)
    data = dumps(snapshot)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_snapshot(path) -> IndexSnapshot:
    return loads(Path(path).read_bytes())
