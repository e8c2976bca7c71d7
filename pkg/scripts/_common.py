import argparse
from pathlib import Path

from hybrid_slnr.harness.config import load_config

CONFIG_DIR = Path(__file__).resolve().parent / "configs"


def parser(description, config_name):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--config", type=Path, default=CONFIG_DIR / config_name)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", type=Path, help="override the config output_dir")
    return p


def load(args, **overrides):
    config = load_config(args.config)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = str(args.out)
    return config.replace(**overrides) if overrides else config
