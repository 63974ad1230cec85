"""
Command modules for the talking head CLI
"""

from commands.ablation import ablation_bp
from commands.evaluate import evaluate_bp
from commands.generate import generate_bp
from commands.synth_data import synth_data_bp
from commands.train import train_bp

BLUEPRINTS = (synth_data_bp, train_bp, generate_bp, evaluate_bp, ablation_bp)

__all__ = ['BLUEPRINTS', 'ablation_bp', 'evaluate_bp', 'generate_bp', 'synth_data_bp', 'train_bp']
