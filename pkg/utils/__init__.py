"""
Shared utilities: errors, validators, media I/O, checkpoints, seeding, training logs
"""
