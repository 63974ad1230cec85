"""
Seeding Helpers
Every random draw in training and sampling goes through an explicit generator
"""

import random

import numpy as np
import torch


def seed_everything(seed: int):
    """Seed the global python, numpy and torch streams (parameter initialisation)"""
    random.seed(seed)
    np.random.seed(seed % (2 ** 32))
    torch.manual_seed(seed)


def torch_generator(seed: int) -> torch.Generator:
    generator = torch.Generator()
    generator.manual_seed(int(seed))
    return generator


def derive_seed(master: int, *key: int) -> int:
    """Child seed for a named stream: SeedSequence(master, spawn_key=key)"""
    return int(np.random.SeedSequence(master, spawn_key=tuple(key)).generate_state(1)[0])
