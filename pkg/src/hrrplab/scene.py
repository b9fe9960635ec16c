"""Synthetic point-scatterer targets and their frequency-domain response.

Six built-in classes with distinct scatterer counts, spacings, and
amplitude patterns stand in for measured aircraft reflectivity data.
Intra-class variability is modeled as per-sample jitter: small range and
amplitude perturbations plus occasional scatterer dropout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import Prng

SPEED_OF_LIGHT = 3.0e8
"""Propagation speed used by the synthetic geometry (m/s).

Chosen so the default 800 MHz synthetic bandwidth gives a range bin of
exactly c/(2B) = 0.1875 m; the toolkit is self-consistent for any value
configured on RadarParams.
"""


@dataclass(frozen=True)
class Scatterer:
    """Idealized point reflector: range offset from the target reference
    point plus a complex reflectivity."""

    range_offset_m: float
    amplitude: complex = 1.0 + 0.0j


@dataclass(frozen=True)
class JitterSpec:
    """Per-sample perturbation applied when drawing target instances."""

    range_std_m: float = 0.0
    amplitude_std: float = 0.0
    dropout_prob: float = 0.0


@dataclass(frozen=True)
class TargetClass:
    class_id: int
    template: tuple[Scatterer, ...]
    jitter: JitterSpec = field(default_factory=JitterSpec)

    def __post_init__(self):
        if len(self.template) == 0:
            raise ValueError(f"class {self.class_id}: template must be non-empty")


@dataclass(frozen=True)
class TargetInstance:
    scatterers: tuple[Scatterer, ...]
    class_id: int
    aspect_seed: int = 0

    def __post_init__(self):
        if len(self.scatterers) == 0:
            raise ValueError("instance must contain at least one scatterer")
        for s in self.scatterers:
            if not np.isfinite(s.amplitude) or not np.isfinite(s.range_offset_m):
                raise ValueError("scatterer fields must be finite")


# Layouts: 4-10 scatterers, extents up to ~40 m, amplitudes in [0.3, 1.0].
# Counts and spacing multisets are pairwise distinct so clean profiles of
# different classes never coincide.
_BUILTIN_LAYOUTS = [
    # (offsets in meters, amplitudes)
    ([-6.0, -1.5, 2.0, 5.5], [1.0, 0.55, 0.8, 0.95]),
    ([-9.0, -4.0, 0.0, 4.5, 8.5], [0.7, 1.0, 0.45, 0.9, 0.6]),
    ([-12.0, -7.0, -2.5, 1.0, 6.0, 11.5], [0.5, 0.85, 1.0, 0.4, 0.75, 0.9]),
    ([-15.0, -10.0, -5.5, 0.0, 4.0, 9.5, 14.0], [0.9, 0.5, 0.65, 1.0, 0.35, 0.8, 0.7]),
    ([-18.0, -13.0, -8.0, -3.5, 2.0, 7.0, 12.5, 17.0],
     [0.6, 0.95, 0.4, 0.75, 1.0, 0.5, 0.85, 0.65]),
    ([-20.0, -15.5, -11.0, -6.0, -2.0, 1.5, 5.0, 10.5, 15.0, 19.5],
     [0.45, 0.7, 1.0, 0.35, 0.8, 0.55, 0.9, 0.4, 0.75, 0.6]),
]

_DEFAULT_JITTER = JitterSpec(range_std_m=0.15, amplitude_std=0.15, dropout_prob=0.1)


def builtin_classes(jitter: JitterSpec | None = None) -> list[TargetClass]:
    """The six default target classes.

    Layouts differ in scatterer count, spacing, and amplitude pattern so
    the clean profiles are separable at 0.1875 m resolution.
    """
    jit = jitter if jitter is not None else _DEFAULT_JITTER
    classes = []
    for cid, (offsets, amps) in enumerate(_BUILTIN_LAYOUTS):
        template = tuple(
            Scatterer(range_offset_m=r, amplitude=complex(a)) for r, a in zip(offsets, amps)
        )
        classes.append(TargetClass(class_id=cid, template=template, jitter=jit))
    return classes


def sample_instance(cls: TargetClass, prng: Prng) -> TargetInstance:
    """Draw one perturbed instance of a class.

    Each template scatterer gets independent range and amplitude jitter
    and may be dropped entirely; if dropout removes everything, the
    strongest template scatterer is kept so the instance is never empty.
    Deterministic given the prng stream.
    """
    n = len(cls.template)
    jit = cls.jitter
    u_drop = prng.uniform(n)
    z_range = prng.normal(n)
    z_amp = prng.normal(n)

    keep = u_drop >= jit.dropout_prob
    if not keep.any():
        amps = np.array([abs(s.amplitude) for s in cls.template])
        keep[int(np.argmax(amps))] = True

    scatterers = []
    for k in range(n):
        if not keep[k]:
            continue
        s = cls.template[k]
        offset = s.range_offset_m + jit.range_std_m * z_range[k]
        scale = max(1.0 + jit.amplitude_std * z_amp[k], 0.05)
        scatterers.append(Scatterer(range_offset_m=offset, amplitude=s.amplitude * scale))
    return TargetInstance(scatterers=tuple(scatterers), class_id=cls.class_id)


def target_transfer(instance: TargetInstance, freqs: np.ndarray,
                    c: float = SPEED_OF_LIGHT) -> np.ndarray:
    """Frequency response H(f) = sum_k a_k * exp(-j 4 pi f dr_k / c).

    ``freqs`` are absolute frequencies in Hz; the two-way phase of each
    scatterer comes from its range offset relative to the target
    reference point (the absolute range and motion phases live in the
    pulse simulator).
    """
    if len(instance.scatterers) == 0:
        raise ValueError("instance has no scatterers")
    freqs = np.asarray(freqs, dtype=np.float64)
    if not np.all(np.isfinite(freqs)):
        raise ValueError("freqs must be finite")
    h = np.zeros(freqs.shape, dtype=np.complex128)
    for s in instance.scatterers:
        h += s.amplitude * np.exp(-1j * 4.0 * np.pi * freqs * s.range_offset_m / c)
    return h


def classes_to_json(classes: list[TargetClass]) -> str:
    """Serialize class templates to the documented JSON schema."""
    doc = {
        "classes": [
            {
                "id": c.class_id,
                "scatterers": [
                    {
                        "range_offset_m": s.range_offset_m,
                        "amp_re": s.amplitude.real,
                        "amp_im": s.amplitude.imag,
                    }
                    for s in c.template
                ],
                "jitter": {
                    "range_std_m": c.jitter.range_std_m,
                    "amplitude_std": c.jitter.amplitude_std,
                    "dropout_prob": c.jitter.dropout_prob,
                },
            }
            for c in classes
        ]
    }
    return json.dumps(doc, indent=2)


def classes_from_json(text: str) -> list[TargetClass]:
    doc = json.loads(text)
    classes = []
    for entry in doc["classes"]:
        template = tuple(
            Scatterer(
                range_offset_m=float(s["range_offset_m"]),
                amplitude=complex(float(s["amp_re"]), float(s["amp_im"])),
            )
            for s in entry["scatterers"]
        )
        jit = entry.get("jitter", {})
        classes.append(
            TargetClass(
                class_id=int(entry["id"]),
                template=template,
                jitter=JitterSpec(
                    range_std_m=float(jit.get("range_std_m", 0.0)),
                    amplitude_std=float(jit.get("amplitude_std", 0.0)),
                    dropout_prob=float(jit.get("dropout_prob", 0.0)),
                ),
            )
        )
    return classes
