"""Tests for the model store."""

import pytest

from app.exceptions import InvalidInputError
from app.services.serialization import dump_model, model_fingerprint
from app.services.storage import LocalModelStore, ModelStore


@pytest.mark.asyncio
async def test_save_and_load(tmp_model_store, small_disk_model):
    fingerprint = await tmp_model_store.save_model(small_disk_model)
    assert fingerprint == model_fingerprint(small_disk_model)
    assert await tmp_model_store.model_exists(fingerprint)

    document = await tmp_model_store.get_document(fingerprint)
    assert document == dump_model(small_disk_model)
    loaded = await tmp_model_store.get_model(fingerprint)
    assert dump_model(loaded) == document


@pytest.mark.asyncio
async def test_missing_model(tmp_model_store):
    assert await tmp_model_store.get_model("0" * 16) is None
    assert not await tmp_model_store.model_exists("0" * 16)
    assert not await tmp_model_store.delete_model("0" * 16)


@pytest.mark.asyncio
async def test_delete(tmp_model_store, small_disk_model):
    fingerprint = await tmp_model_store.save_model(small_disk_model)
    assert await tmp_model_store.delete_model(fingerprint)
    assert not await tmp_model_store.model_exists(fingerprint)


@pytest.mark.asyncio
async def test_rejects_malformed_keys(tmp_model_store):
    with pytest.raises(InvalidInputError):
        await tmp_model_store.get_document("../../etc/passwd")
    with pytest.raises(InvalidInputError):
        await tmp_model_store.model_exists("ABCDEF0123456789")


@pytest.mark.asyncio
async def test_files_named_by_fingerprint(tmp_model_store, small_disk_model):
    fingerprint = await tmp_model_store.save_model(small_disk_model)
    assert (tmp_model_store.backend.base_path / f"{fingerprint}.svdd").is_file()


@pytest.mark.asyncio
async def test_directory_created_on_first_save(tmp_path, small_disk_model):
    base = tmp_path / "nested" / "models"
    store = ModelStore(LocalModelStore(base))
    assert not base.exists()
    assert not await store.model_exists(model_fingerprint(small_disk_model))
    assert not base.exists()
    await store.save_model(small_disk_model)
    assert base.is_dir()
