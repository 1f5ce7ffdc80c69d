"""Golden CLI configs and the job each one runs."""

from pathlib import Path

HERE = Path(__file__).parent
CONFIGS = HERE / "configs"
GOLDEN = HERE / "golden"

_PREFIX = {"euler": "euler-form", "orient": "orientability"}


def job_for(config: Path) -> str:
    head = config.stem.split("_", 1)[0]
    return _PREFIX.get(head, head)


def cases() -> list[Path]:
    return sorted(CONFIGS.glob("*.conf"))
