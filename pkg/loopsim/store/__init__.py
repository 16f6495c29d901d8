from .records import CONFIG_NAME, MANIFEST_NAME, RunManifest, RunStore, file_digest, write_json, write_table

__all__ = ["CONFIG_NAME", "MANIFEST_NAME", "RunManifest", "RunStore", "file_digest", "write_json", "write_table"]
