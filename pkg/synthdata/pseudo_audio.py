"""
Pseudo-Speech Synthesis
Harmonic tones whose loudness and formant balance follow the driving signal
"""

import numpy as np

from audio.features import AudioClip
from synthdata.identity import DrivingSignal, SyntheticIdentity

HARMONIC_WEIGHTS = np.array([1.0, 0.5, 0.35, 0.2])
FORMANT_DEPTH = 0.25
OUTPUT_GAIN = 0.3


def upsample_signal(d: DrivingSignal, n_samples: int, sample_rate: int) -> np.ndarray:
    """Piecewise-linear envelope at audio rate; frame i sits at time i / fps"""
    frame_times = np.arange(len(d)) / d.fps
    sample_times = np.arange(n_samples) / sample_rate
    return np.interp(sample_times, frame_times, d.values)


def synthesize_pseudo_audio(identity: SyntheticIdentity, d: DrivingSignal, sample_rate: int = 16000) -> AudioClip:
    """
    Render the pseudo-speech waveform for one driving signal

    The envelope equals d upsampled to audio rate; the second and third
    harmonics gain weight as the mouth opens (formant modulation), scaled
    by the identity's formant offsets. d = 0 gives exact silence.

    Args:
        identity: Sets base frequency and formant offsets
        d: Mouth-opening control
        sample_rate: Output sample rate in Hz

    Returns:
        AudioClip: Mono waveform in [-1, 1]
    """
    n_samples = int(round(d.duration * sample_rate))
    envelope = upsample_signal(d, n_samples, sample_rate)
    t = np.arange(n_samples) / sample_rate

    o1, o2 = identity.formant_offsets
    base = HARMONIC_WEIGHTS * np.array([1.0, o1, o2, 1.0])
    formant = np.array([0.0, 1.0, 1.0, 0.0]) * FORMANT_DEPTH

    wave = np.zeros(n_samples)
    for k in range(HARMONIC_WEIGHTS.size):
        weight = base[k] * (1.0 + formant[k] * envelope)
        wave += weight * np.sin(2.0 * np.pi * (k + 1) * identity.base_frequency * t)
    return AudioClip(OUTPUT_GAIN * envelope * wave, sample_rate)
