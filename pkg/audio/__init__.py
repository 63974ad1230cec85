"""
Pluggable speech feature extraction for the landmark generator
"""

from audio.cache import load_embedding, save_embedding
from audio.features import (
    AudioClip,
    ContentEmbedding,
    ContentWindow,
    FeatureConfig,
    IdentityEmbedding,
    align_window,
    align_windows,
    extract_content,
    extract_identity,
    log_mel,
)

__all__ = [
    'AudioClip', 'ContentEmbedding', 'ContentWindow', 'FeatureConfig', 'IdentityEmbedding',
    'align_window', 'align_windows', 'extract_content', 'extract_identity', 'load_embedding',
    'log_mel', 'save_embedding',
]
