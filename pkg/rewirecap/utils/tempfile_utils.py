# rewirecap/utils/tempfile_utils.py

import tempfile
import os
import shutil

from rewirecap.utils.log_manager import LogManager

logger = LogManager.setup_main_logger()

class TempFileManager:
    @staticmethod
    def atomic_write_text(path: str, text: str) -> str:
        """
        Writes text next to its destination and renames it into place, so
        readers never observe a half-written file.
        """
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(prefix=".tmp_", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp_path, path)
        except Exception:
            TempFileManager.cleanup_file(tmp_path)
            raise
        return path

    @staticmethod
    def cleanup_file(path: str) -> None:
        """
        Deletes a file or directory tree if it exists.
        """
        if not path:
            return
        try:
            if os.path.isfile(path):
                os.remove(path)
                logger.debug(f"Deleted file: {path}")
            elif os.path.isdir(path):
                shutil.rmtree(path)
                logger.debug(f"Deleted directory: {path}")
        except Exception as e:
            logger.error(f"Cleanup failed for {path}: {e}", exc_info=True)
