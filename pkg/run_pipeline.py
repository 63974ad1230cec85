"""
Desk-Scale Pipeline Walkthrough
===============================
Runs every stage of the pipeline against the synthetic corpus:
1. Rendering the corpus
2. Training the autoencoder, A2L and L2V
3. Generating a clip from held-out audio
4. Scoring it against ground truth
"""

import sys
from datetime import datetime

import app
from config import Config
from synthdata.dataset import clip_entries

# Set UTF-8 encoding for Windows console
if sys.platform == 'win32':
    try:
        sys.stdout.reconfigure(encoding='utf-8')
    except AttributeError:
        pass


# Color codes for terminal output
class Colors:
    HEADER = '\033[95m'
    OKBLUE = '\033[94m'
    OKCYAN = '\033[96m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'


def print_header(text):
    """Print formatted header"""
    print("\n" + "=" * 80)
    print(f"{Colors.HEADER}{Colors.BOLD}{text}{Colors.ENDC}")
    print("=" * 80)


def print_success(text):
    print(f"{Colors.OKGREEN}[OK] {text}{Colors.ENDC}")


def print_error(text):
    print(f"{Colors.FAIL}[ERROR] {text}{Colors.ENDC}")


def print_info(text):
    print(f"{Colors.OKCYAN}[INFO] {text}{Colors.ENDC}")


def run_step(title, argv):
    """Run one CLI command; returns True on exit code 0"""
    print_header(title)
    print_info('talkhead ' + ' '.join(argv))
    code = app.main(argv)
    if code != 0:
        print_error(f"Step failed with exit code {code}")
        return False
    print_success(title)
    return True


def main(extra_args=None):
    """Walk through the whole pipeline with the desk preset"""
    extra_args = ['--preset', 'desk'] + list(extra_args or [])
    print_header("Talking Head Pipeline - Desk Walkthrough")
    print_info(f"Timestamp: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    # resolve paths exactly as the CLI will
    args = app.build_parser().parse_args(extra_args + ['synth-data'])
    config = Config.load(args.config, preset=args.preset, seed=args.seed,
                         data_dir=args.data_dir, run_dir=args.run_dir)
    print_info(f"Configuration: {config.get_info()}")

    steps = [
        ("STEP 1: Rendering the synthetic corpus", ['synth-data']),
        ("STEP 2: Training the autoencoder", ['train', 'ae']),
        ("STEP 3: Training audio-to-landmark", ['train', 'a2l']),
        ("STEP 4: Training landmark-to-video", ['train', 'l2v']),
    ]
    for title, argv in steps:
        if not run_step(title, extra_args + argv):
            return False

    val = clip_entries(config.data_dir, 'val')
    if not val:
        print_error("The corpus has no validation clips")
        return False
    clip_dir = config.data_dir / val[0]['path']
    out = config.run_dir / 'generated' / val[0]['path'].replace('/', '_')

    if not run_step("STEP 5: Generating from held-out audio",
                    extra_args + ['generate', '--audio', str(clip_dir / 'audio.wav'),
                                  '--reference', str(clip_dir), '--out', str(out)]):
        return False
    if not run_step("STEP 6: Scoring against ground truth",
                    extra_args + ['evaluate', '--gen', str(out), '--gt', str(clip_dir)]):
        return False

    print_header("WALKTHROUGH COMPLETED")
    print_info("Next steps:")
    print("1. Inspect the frames and landmarks.csv under " + str(out))
    print("2. Run the ablation sweep: python app.py ablation")
    print("=" * 80 + "\n")
    return True


if __name__ == "__main__":
    try:
        success = main(sys.argv[1:])
        sys.exit(0 if success else 1)
    except KeyboardInterrupt:
        print(f"{Colors.WARNING}\n\nWalkthrough interrupted by user{Colors.ENDC}")
        sys.exit(1)
