import logging
import os

# Configure logger for this module
logger = logging.getLogger(__name__)

DEFAULT_HOME = os.path.join('~', '.rankbreak')

class FileConfigManager:
    """
    Manages file paths within the rankbreak home directory, ensuring parent
    directories exist before file operations.

    The home directory is taken from the RANKBREAK_HOME environment variable
    when set, otherwise it is ~/.rankbreak.
    """
    def __init__(self, base_dir: str | None = None):
        """
        Initializes the FileConfigManager with a base directory.

        Args:
            base_dir (str | None): Explicit base directory. Overrides RANKBREAK_HOME.
        """
        base_dir = base_dir or os.getenv('RANKBREAK_HOME', DEFAULT_HOME)
        self._base_dir = os.path.abspath(os.path.expanduser(base_dir))
        self._ensure_directory_exists(self._base_dir)
        logger.debug(f"FileConfigManager initialized with base directory: '{self._base_dir}'")

    @property
    def base_dir(self) -> str:
        """Read-only property for the home directory."""
        return self._base_dir

    @staticmethod
    def _ensure_directory_exists(dir_path: str):
        """
        Ensures that the given directory exists. Creates it if it does not.

        Args:
            dir_path (str): The path to the directory.
        """
        if dir_path and not os.path.exists(dir_path):
            os.makedirs(dir_path, exist_ok=True)
            logger.info(f"Created directory: '{dir_path}'")

    def get_file_path(self, relative_path: str) -> str:
        """
        Constructs the full, absolute path for a given relative file path,
        and ensures all necessary parent directories for that file exist.

        Args:
            relative_path (str): The path to the file relative to the base_dir.

        Returns:
            str: The full absolute path to the file.
        """
        full_path = os.path.join(self._base_dir, relative_path)
        self._ensure_directory_exists(os.path.dirname(full_path))
        return full_path

    @classmethod
    def prepare_output_path(cls, path: str) -> str:
        """
        Makes sure the parent directory of an output file exists.

        Args:
            path (str): Output file path, absolute or relative to the working directory.

        Returns:
            str: The absolute output path.
        """
        full_path = os.path.abspath(os.path.expanduser(path))
        cls._ensure_directory_exists(os.path.dirname(full_path))
        return full_path
