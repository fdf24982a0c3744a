"""Model store used by the HTTP service."""

import re
from abc import ABC, abstractmethod
from pathlib import Path

from app.config import settings
from app.exceptions import InvalidInputError
from app.models import SvddModel
from app.services.serialization import dump_model, load_model, model_fingerprint

_KEY_PATTERN = re.compile(r"^[0-9a-f]{16}$")


class ModelStoreBackend(ABC):
    """Abstract base class for model store backends."""

    @abstractmethod
    async def put(self, key: str, document: str) -> str:
        """Store a model document.

        Args:
            key: Model fingerprint
            document: Serialized model

        Returns:
            Storage key
        """

    @abstractmethod
    async def get(self, key: str) -> str | None:
        """Read a model document, or None if not found."""

    @abstractmethod
    async def delete(self, key: str) -> bool:
        """Delete a model document; True if something was removed."""

    @abstractmethod
    async def exists(self, key: str) -> bool:
        """Check if a model document exists."""


class LocalModelStore(ModelStoreBackend):
    """Local file system backend: one ``<fingerprint>.svdd`` file per model."""

    def __init__(self, base_path: str | Path | None = None):
        """Initialize local storage."""
        self.base_path = Path(base_path or settings.model_store_path)

    def ensure_directory(self) -> Path:
        """Create the store directory if needed; nothing is created before this."""
        self.base_path.mkdir(parents=True, exist_ok=True)
        return self.base_path

    def _path(self, key: str) -> Path:
        return self.base_path / f"{key}.svdd"

    async def put(self, key: str, document: str) -> str:
        self.ensure_directory()
        self._path(key).write_text(document, encoding="utf-8")
        return key

    async def get(self, key: str) -> str | None:
        path = self._path(key)
        if not path.exists():
            return None
        return path.read_text(encoding="utf-8")

    async def delete(self, key: str) -> bool:
        path = self._path(key)
        if path.exists():
            path.unlink()
            return True
        return False

    async def exists(self, key: str) -> bool:
        return self._path(key).exists()


class ModelStore:
    """Stores trained models under their fingerprints."""

    def __init__(self, backend: ModelStoreBackend | None = None):
        """Initialize the store with the configured backend."""
        self.backend = backend or LocalModelStore()

    @staticmethod
    def _check_key(fingerprint: str) -> str:
        if not _KEY_PATTERN.match(fingerprint):
            raise InvalidInputError(f"malformed model fingerprint {fingerprint!r}")
        return fingerprint

    async def save_model(self, model: SvddModel) -> str:
        """Persist ``model``; returns its fingerprint."""
        fingerprint = model_fingerprint(model)
        await self.backend.put(fingerprint, dump_model(model))
        return fingerprint

    async def get_document(self, fingerprint: str) -> str | None:
        return await self.backend.get(self._check_key(fingerprint))

    async def get_model(self, fingerprint: str) -> SvddModel | None:
        document = await self.get_document(fingerprint)
        if document is None:
            return None
        return load_model(document, f"model {fingerprint}")

    async def delete_model(self, fingerprint: str) -> bool:
        return await self.backend.delete(self._check_key(fingerprint))

    async def model_exists(self, fingerprint: str) -> bool:
        return await self.backend.exists(self._check_key(fingerprint))


# Global model store instance
model_store = ModelStore()
