"""Binary checkpoint format for model weights

Layout, little-endian throughout:
    b"LFCK" | u32 version | u32 entry count
    per entry: u32 name length | UTF-8 name | u32 rank | rank x u32 dims | float32 payload
"""
import logging
import struct
from pathlib import Path
from typing import Dict, Union

import numpy as np

from ..errors import CheckpointError
from ..models import ModelConfig, ModelParams, build_model

# Configure logging
logger = logging.getLogger(__name__)

MAGIC = b"LFCK"
VERSION = 1
U32 = struct.Struct("<I")


def encode_state(state: Dict[str, np.ndarray]) -> bytes:
    chunks = [MAGIC, U32.pack(VERSION), U32.pack(len(state))]
    for name, value in state.items():
        encoded = name.encode("utf-8")
        array = np.ascontiguousarray(value, dtype="<f4")
        chunks.append(U32.pack(len(encoded)))
        chunks.append(encoded)
        chunks.append(U32.pack(array.ndim))
        chunks.extend(U32.pack(d) for d in array.shape)
        chunks.append(array.tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, payload: bytes):
        self.payload = payload
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        if self.offset + size > len(self.payload):
            raise CheckpointError(f"truncated checkpoint while reading {what}", self.offset)
        chunk = self.payload[self.offset:self.offset + size]
        self.offset += size
        return chunk

    def u32(self, what: str) -> int:
        return U32.unpack(self.take(4, what))[0]


def decode_state(payload: bytes) -> Dict[str, np.ndarray]:
    reader = _Reader(payload)
    if reader.take(4, "magic") != MAGIC:
        raise CheckpointError("bad checkpoint magic", 0)
    version = reader.u32("version")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}", 4)
    count = reader.u32("entry count")
    state: Dict[str, np.ndarray] = {}
    for _ in range(count):
        start = reader.offset
        length = reader.u32("name length")
        try:
            name = reader.take(length, "name").decode("utf-8")
        except UnicodeDecodeError:
            raise CheckpointError("entry name is not valid UTF-8", start + 4)
        if name in state:
            raise CheckpointError(f"duplicate entry {name}", start)
        rank = reader.u32(f"rank of {name}")
        dims = tuple(reader.u32(f"dims of {name}") for _ in range(rank))
        size = int(np.prod(dims, dtype=np.int64)) * 4
        data = reader.take(size, f"payload of {name}")
        state[name] = np.frombuffer(data, dtype="<f4").reshape(dims).astype(np.float32)
    if reader.offset != len(payload):
        raise CheckpointError(f"{len(payload) - reader.offset} trailing bytes after the last entry", reader.offset)
    return state


def save_checkpoint(params: ModelParams, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_state(params.state_dict()))
    logger.info(f"Checkpoint with {len(params.tensors)} tensors saved to {path}")
    return path


def load_checkpoint(path: Union[str, Path], config: ModelConfig) -> ModelParams:
    """Rebuild the model described by ``config`` and fill it from ``path``"""
    state = decode_state(Path(path).read_bytes())
    params = build_model(config)
    params.load_state_dict(state)
    return params
