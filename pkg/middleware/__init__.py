"""
Middleware for the talking head commands
"""

from middleware.artifact_guard import artifact_path, check_artifacts, output_lock, requires_artifacts

__all__ = ['artifact_path', 'check_artifacts', 'output_lock', 'requires_artifacts']
