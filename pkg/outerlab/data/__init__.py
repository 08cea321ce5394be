"""Suite configurations shipped with outerlab."""

from pathlib import Path


def get_config_path(filename: str) -> str:
    """Get the path to a shipped suite config.

    Example:
        >>> from outerlab.data import get_config_path
        >>> run_suite(get_config_path("negative_control.cfg")).exit_code
        1
    """
    data_dir = Path(__file__).parent
    return str(data_dir / filename)


def list_configs() -> list:
    """Names of the shipped suite configs."""
    data_dir = Path(__file__).parent
    return sorted(f.name for f in data_dir.glob("*.cfg"))


__all__ = ["get_config_path", "list_configs"]
