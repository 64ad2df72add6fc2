"""Phantom dataset generation, intensity normalization, SNR-controlled noise
injection, and the on-disk formats (raw float images, checkpoints, 8-bit PNG).

All formats are little-endian and platform-independent.  A phantom is a
procedurally generated brain-like axial slice: bright skull ring, textured
parenchyma, two dark ventricle lobes, gyral ripple; the mask covers the head
(brain + skull).  Distinct seeds vary head eccentricity, ventricle size and
asymmetry, and texture phases.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

__all__ = [
    "FormatError", "IntegrityError", "NormRecord", "SampleMeta", "ImageSample",
    "NoiseSpec", "PhantomStyle", "generate_phantom", "normalize", "denormalize",
    "add_noise", "write_image", "read_image", "write_checkpoint",
    "read_checkpoint", "export_png8", "read_pgm", "write_dataset", "load_dataset",
]

IMAGE_MAGIC = b"BSLCIMG1"
CKPT_MAGIC = b"BSLCCKP1"
KNOWN_MODEL_KINDS = ("gan", "dae")
MAX_DIM = 1 << 20


class FormatError(ValueError):
    """Malformed file: bad magic, truncated payload, bogus dimensions."""


class IntegrityError(FormatError):
    """Checksum mismatch between manifest and blob."""


@dataclass(frozen=True)
class NormRecord:
    """Affine map [src_lo, src_hi] -> [dst_lo, dst_hi], stored so it can be inverted."""
    src_lo: float
    src_hi: float
    dst_lo: float
    dst_hi: float


@dataclass
class SampleMeta:
    id: str
    source: dict = field(default_factory=dict)
    norm: NormRecord | None = None


@dataclass
class ImageSample:
    image: np.ndarray          # 2-d float32
    mask: np.ndarray           # 2-d bool, same shape
    meta: SampleMeta

    def __post_init__(self):
        if self.image.shape != self.mask.shape:
            raise ValueError(f"image shape {self.image.shape} != mask shape {self.mask.shape}")


@dataclass(frozen=True)
class NoiseSpec:
    snr: float
    seed: int
    distribution: str = "gaussian"

    def __post_init__(self):
        if self.snr <= 0:
            raise ValueError(f"snr must be > 0, got {self.snr}")
        if self.distribution != "gaussian":
            raise ValueError(f"unsupported noise distribution {self.distribution!r}")


# ---------------------------------------------------------------------------
# phantom generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhantomStyle:
    """Knobs for the procedural slice; all ranges are sampled per seed."""
    head_width: tuple = (0.68, 0.80)       # semi-axis, fraction of W/2
    head_height: tuple = (0.80, 0.92)      # semi-axis, fraction of H/2
    skull_thickness: tuple = (0.06, 0.10)  # fraction of head radius
    skull_brightness: float = 0.88
    csf_gap: float = 0.04
    csf_dark: float = 0.16
    tissue_base: float = 0.52
    tissue_texture: float = 0.06
    gyri_amplitude: float = 0.05
    gyri_count: tuple = (9, 14)            # angular ripple lobes
    ventricle_size: tuple = (0.12, 0.24)   # fraction of head scale
    ventricle_dark: float = 0.15
    smooth_sigma: float = 0.7


def generate_phantom(seed: int, height: int, width: int,
                     style: PhantomStyle = PhantomStyle()) -> ImageSample:
    """Deterministic brain-like slice with intensities in [0,1].

    The mask is the head ellipse interior (brain + skull ring).  Background
    outside the mask is exactly 0.
    """
    if height < 32 or width < 32:
        raise ValueError(f"phantom dimensions must be >= 32, got {height}x{width}")
    rng = np.random.default_rng(seed)
    u = rng.uniform

    a = u(*style.head_width) * (width / 2.0)
    b = u(*style.head_height) * (height / 2.0)
    cy = height / 2.0 + u(-0.02, 0.02) * height
    cx = width / 2.0 + u(-0.02, 0.02) * width
    theta = u(-0.05, 0.05)

    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    dy, dx = yy - cy, xx - cx
    ct, st = np.cos(theta), np.sin(theta)
    xr = (dx * ct + dy * st) / a
    yr = (-dx * st + dy * ct) / b
    r = np.sqrt(xr * xr + yr * yr)
    ang = np.arctan2(yr, xr)

    mask = r <= 1.0
    skull_thk = u(*style.skull_thickness)
    brain_r = 1.0 - skull_thk - style.csf_gap

    img = np.zeros((height, width), np.float64)
    # skull ring, brightest along its midline
    ring = mask & (r > 1.0 - skull_thk)
    img[ring] = style.skull_brightness * (1.0 - 1.5 * np.abs(r[ring] - (1.0 - skull_thk / 2)))
    # thin dark CSF gap under the skull
    gap = mask & ~ring & (r > brain_r)
    img[gap] = style.csf_dark

    brain = r <= brain_r
    # smooth low-frequency tissue texture: three seeded cosine waves
    tex = np.zeros_like(img)
    for _ in range(3):
        fy, fx = u(0.5, 2.0), u(0.5, 2.0)
        ph = u(0, 2 * np.pi)
        tex += np.cos(2 * np.pi * (fy * yr + fx * xr) + ph)
    tex *= style.tissue_texture / 3.0
    # gyral ripple: angular banding that grows toward the cortex
    lobes = int(rng.integers(*style.gyri_count))
    gyr_ph = u(0, 2 * np.pi)
    cortex_w = (np.clip((r - 0.45) / (brain_r - 0.45), 0.0, 1.0)) ** 1.5
    gyri = style.gyri_amplitude * np.sin(lobes * ang + gyr_ph + 2.5 * r) * cortex_w
    img[brain] = style.tissue_base + tex[brain] + gyri[brain]

    # two mirrored dark ventricle lobes with seed-varied size and asymmetry
    vsize = u(*style.ventricle_size)
    vy = u(-0.10, 0.02)
    vdx = u(0.14, 0.22)
    tilt = u(0.25, 0.55)
    for side in (-1.0, 1.0):
        asym = u(0.8, 1.2)
        s = vsize * asym
        vxr = (xr - side * vdx) / (0.55 * s)
        vyr = (yr - vy) / (1.45 * s)
        vx2 = vxr * np.cos(side * tilt) + vyr * np.sin(side * tilt)
        vy2 = -vxr * np.sin(side * tilt) + vyr * np.cos(side * tilt)
        vent = (vx2 * vx2 + vy2 * vy2) <= 1.0
        img[vent & brain] = style.ventricle_dark
    # interhemispheric fissure: faint dark midline
    fissure = brain & (np.abs(xr) < 0.018) & (np.abs(yr) > 0.35)
    img[fissure] = style.csf_dark + 0.06

    img = ndimage.gaussian_filter(img, style.smooth_sigma)
    img[~mask] = 0.0
    img = np.clip(img, 0.0, 1.0).astype(np.float32)
    meta = SampleMeta(id=f"phantom_{seed:06d}",
                      source={"kind": "phantom", "seed": int(seed)},
                      norm=NormRecord(0.0, 1.0, 0.0, 1.0))
    return ImageSample(img, mask, meta)


# ---------------------------------------------------------------------------
# normalization / noise
# ---------------------------------------------------------------------------

def normalize(image: np.ndarray, target_range=(0.0, 1.0)) -> tuple[np.ndarray, NormRecord]:
    """Affine map of [min, max] onto the target range; errors on a constant image."""
    lo = float(image.min())
    hi = float(image.max())
    if hi <= lo:
        raise ValueError("normalize: constant image has no intensity range")
    a, b = (float(t) for t in target_range)
    if b <= a:
        raise ValueError(f"normalize: bad target range {target_range}")
    out = (image.astype(np.float32) - np.float32(lo)) * np.float32((b - a) / (hi - lo)) + np.float32(a)
    return out, NormRecord(lo, hi, a, b)


def denormalize(image: np.ndarray, record: NormRecord) -> np.ndarray:
    scale = (record.src_hi - record.src_lo) / (record.dst_hi - record.dst_lo)
    return ((image.astype(np.float32) - np.float32(record.dst_lo)) * np.float32(scale)
            + np.float32(record.src_lo))


def add_noise(sample: ImageSample, spec: NoiseSpec) -> ImageSample:
    """Add Gaussian noise inside the mask at sigma = mean(in-mask)/snr.

    Amplitude-SNR convention.  Pixels outside the mask are untouched; the
    result is clamped to the [0,1] storage range and the clipped fraction is
    recorded in the sample metadata.  Deterministic per (spec.seed).
    """
    mask = sample.mask
    n_in = int(mask.sum())
    if n_in == 0:
        raise ValueError("add_noise: empty mask")
    signal = float(sample.image[mask].mean())
    sigma = signal / spec.snr
    rng = np.random.default_rng(spec.seed)
    noise = rng.standard_normal(n_in).astype(np.float32) * np.float32(sigma)
    out = sample.image.copy()
    noisy_vals = out[mask] + noise
    clipped = float(np.mean((noisy_vals < 0.0) | (noisy_vals > 1.0)))
    out[mask] = np.clip(noisy_vals, 0.0, 1.0)
    meta = SampleMeta(
        id=f"{sample.meta.id}+snr{spec.snr:g}",
        source={"kind": "noisy", "base": sample.meta.id, "snr": spec.snr,
                "noise_seed": int(spec.seed), "sigma": sigma,
                "clipped_frac": clipped},
        norm=sample.meta.norm)
    return ImageSample(out, mask.copy(), meta)


# ---------------------------------------------------------------------------
# raw float image format: 8-byte magic, u32 height, u32 width, f32 pixels (LE)
# ---------------------------------------------------------------------------

def write_image(path, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError(f"write_image: expected a 2-d image, got shape {image.shape}")
    h, w = image.shape
    with open(path, "wb") as fh:
        fh.write(IMAGE_MAGIC)
        fh.write(struct.pack("<II", h, w))
        fh.write(np.ascontiguousarray(image, dtype="<f4").tobytes())


def read_image(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != IMAGE_MAGIC:
        raise FormatError(f"{path}: not a raw image file (bad magic)")
    h, w = struct.unpack("<II", data[8:16])
    if not (0 < h <= MAX_DIM and 0 < w <= MAX_DIM):
        raise FormatError(f"{path}: implausible dimensions {h}x{w}")
    expected = 16 + 4 * h * w
    if len(data) != expected:
        raise FormatError(f"{path}: payload is {len(data)} bytes, expected {expected}")
    return np.frombuffer(data, dtype="<f4", offset=16).reshape(h, w).astype(np.float32)


# ---------------------------------------------------------------------------
# checkpoint format: magic, u64 manifest length, JSON manifest, tensor blob
# ---------------------------------------------------------------------------

def write_checkpoint(path, kind: str, meta: dict, tensors: dict[str, np.ndarray]) -> None:
    """Manifest lists (name, shape, offset, crc32) per tensor; the blob holds
    float32 little-endian payloads back to back."""
    if kind not in KNOWN_MODEL_KINDS:
        raise FormatError(f"unknown model kind {kind!r}")
    entries = []
    blob = bytearray()
    for name, arr in tensors.items():
        payload = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        entries.append({
            "name": name,
            "shape": list(np.asarray(arr).shape),
            "dtype": "<f4",
            "offset": len(blob),
            "nbytes": len(payload),
            "crc32": zlib.crc32(payload),
        })
        blob.extend(payload)
    manifest = {
        "kind": kind,
        "meta": meta,
        "tensors": entries,
        "blob_nbytes": len(blob),
        "blob_crc32": zlib.crc32(bytes(blob)),
    }
    mbytes = json.dumps(manifest, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(CKPT_MAGIC)
        fh.write(struct.pack("<Q", len(mbytes)))
        fh.write(mbytes)
        fh.write(bytes(blob))


def read_checkpoint(path) -> tuple[str, dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != CKPT_MAGIC:
        raise FormatError(f"{path}: not a checkpoint file (bad magic)")
    (mlen,) = struct.unpack("<Q", data[8:16])
    if 16 + mlen > len(data):
        raise FormatError(f"{path}: manifest length {mlen} exceeds file size")
    try:
        manifest = json.loads(data[16:16 + mlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: unreadable manifest: {exc}") from exc
    kind = manifest.get("kind")
    if kind not in KNOWN_MODEL_KINDS:
        raise FormatError(f"{path}: unknown model kind {kind!r}")
    blob = data[16 + mlen:]
    if len(blob) != manifest["blob_nbytes"]:
        raise FormatError(f"{path}: blob is {len(blob)} bytes, manifest says "
                          f"{manifest['blob_nbytes']}")
    if zlib.crc32(blob) != manifest["blob_crc32"]:
        raise IntegrityError(f"{path}: blob checksum mismatch")
    tensors = {}
    for ent in manifest["tensors"]:
        if ent["dtype"] != "<f4":
            raise FormatError(f"{path}: unsupported tensor dtype {ent['dtype']!r}")
        start, nbytes = ent["offset"], ent["nbytes"]
        payload = blob[start:start + nbytes]
        if len(payload) != nbytes:
            raise FormatError(f"{path}: tensor {ent['name']!r} extends past blob end")
        if zlib.crc32(payload) != ent["crc32"]:
            raise IntegrityError(f"{path}: checksum mismatch for tensor {ent['name']!r}")
        tensors[ent["name"]] = (np.frombuffer(payload, dtype="<f4")
                                .reshape(ent["shape"]).astype(np.float32))
    return kind, manifest["meta"], tensors


# ---------------------------------------------------------------------------
# 8-bit grayscale PNG export (hand-rolled encoder, zlib only)
# ---------------------------------------------------------------------------

def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    return (struct.pack(">I", len(payload)) + tag + payload
            + struct.pack(">I", zlib.crc32(tag + payload)))


def export_png8(image: np.ndarray, path) -> None:
    """Quantize a [0,1] image to round(255*x) and write grayscale 8-bit PNG."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ValueError(f"export_png8: expected a 2-d image, got shape {image.shape}")
    h, w = image.shape
    q = np.clip(np.rint(image.astype(np.float64) * 255.0), 0, 255).astype(np.uint8)
    raw = b"".join(b"\x00" + q[i].tobytes() for i in range(h))
    ihdr = struct.pack(">IIBBBBB", w, h, 8, 0, 0, 0, 0)
    with open(path, "wb") as fh:
        fh.write(b"\x89PNG\r\n\x1a\n")
        fh.write(_png_chunk(b"IHDR", ihdr))
        fh.write(_png_chunk(b"IDAT", zlib.compress(raw, 6)))
        fh.write(_png_chunk(b"IEND", b""))


def read_pgm(path) -> np.ndarray:
    """Interoperability import: P2 (ascii) / P5 (binary) grayscale to [0,1] floats."""
    data = Path(path).read_bytes()
    if data[:2] not in (b"P2", b"P5"):
        raise FormatError(f"{path}: not a PGM file")
    binary = data[:2] == b"P5"

    # strip comments, then read the three header integers
    tokens: list[bytes] = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError(f"{path}: truncated PGM header")
        tokens.append(data[start:pos])
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise FormatError(f"{path}: bad PGM header: {exc}") from exc
    if maxval <= 0 or maxval > 65535:
        raise FormatError(f"{path}: bad PGM maxval {maxval}")
    pos += 1  # single whitespace after maxval
    if binary:
        dtype = ">u2" if maxval > 255 else "u1"
        count = h * w
        arr = np.frombuffer(data, dtype=dtype, count=count, offset=pos) \
            if len(data) - pos >= count * np.dtype(dtype).itemsize else None
        if arr is None:
            raise FormatError(f"{path}: truncated PGM payload")
    else:
        arr = np.array(data[pos:].split(), dtype=np.int64)
        if arr.size != h * w:
            raise FormatError(f"{path}: expected {h * w} ascii samples, got {arr.size}")
    return arr.reshape(h, w).astype(np.float32) / np.float32(maxval)


# ---------------------------------------------------------------------------
# dataset directory: phantoms + masks + manifest
# ---------------------------------------------------------------------------

def write_dataset(out_dir, n: int, height: int, width: int, base_seed: int,
                  style: PhantomStyle = PhantomStyle()) -> dict:
    """Write n phantoms (sample i uses seed base_seed + i) plus a manifest."""
    out = Path(out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    (out / "masks").mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(n):
        sample = generate_phantom(base_seed + i, height, width, style)
        img_rel = f"images/{sample.meta.id}.img"
        mask_rel = f"masks/{sample.meta.id}.img"
        write_image(out / img_rel, sample.image)
        write_image(out / mask_rel, sample.mask.astype(np.float32))
        entries.append({"id": sample.meta.id, "image": img_rel, "mask": mask_rel,
                        "seed": base_seed + i})
    manifest = {"n": n, "height": height, "width": width, "base_seed": base_seed,
                "style": asdict(style), "entries": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return manifest


def load_dataset(data_dir) -> list[ImageSample]:
    root = Path(data_dir)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise FileNotFoundError(f"no dataset manifest at {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    samples = []
    for ent in manifest["entries"]:
        image = read_image(root / ent["image"])
        mask = read_image(root / ent["mask"]) > 0.5
        meta = SampleMeta(id=ent["id"],
                          source={"kind": "phantom", "seed": ent["seed"]},
                          norm=NormRecord(0.0, 1.0, 0.0, 1.0))
        samples.append(ImageSample(image, mask, meta))
    return samples
