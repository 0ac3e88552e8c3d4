#!/usr/bin/env python3
"""Start the tutoring service from a config file.

Usage: python scripts/run_server.py [path/to/config.ini]
Defaults to config.example.ini at the repository root.
"""

from __future__ import annotations

import sys
from pathlib import Path

import uvicorn

from tutorkit.api import create_app
from tutorkit.config import build_library, build_provider, load_config
from tutorkit.engine import TutorEngine


def main() -> int:
    root = Path(__file__).resolve().parent.parent
    config_path = Path(sys.argv[1]) if len(sys.argv) > 1 else root / "config.example.ini"
    config = load_config(config_path)
    engine = TutorEngine(
        provider=build_provider(config),
        policy=config.policy,
        data_dir=config.data_dir,
        library=build_library(config),
    )
    print(f"provider: {engine.provider_id}")
    print(f"data dir: {config.data_dir}")
    uvicorn.run(create_app(engine), host=config.listen_host, port=config.listen_port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
