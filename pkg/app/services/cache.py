"""
Service for caching sweep results.
"""
import hashlib
import json
import os
from datetime import datetime, timedelta
from typing import Any, Dict, List, Optional

from app.config.settings import CACHE_MAX_AGE_DAYS
from app.models.sweep import SweepRow, SweepSpec
from app.services.logger import logger
from app.utils.data_utils import row_from_dict, row_to_dict


class SweepCache:
    def __init__(self, cache_dir: str = "cache"):
        """Initialize the cache service with a cache directory."""
        self.cache_dir = cache_dir
        self._ensure_cache_dir()

    def _ensure_cache_dir(self) -> None:
        """Ensure the cache directory exists."""
        if not os.path.exists(self.cache_dir):
            os.makedirs(self.cache_dir)

    def _generate_cache_key(self, spec: SweepSpec) -> str:
        """Generate a unique cache key for a sweep spec."""
        key = json.dumps(spec.cache_payload(), sort_keys=True)
        return hashlib.md5(key.encode()).hexdigest()

    def _get_cache_path(self, cache_key: str) -> str:
        """Get the full path for a cache file."""
        return os.path.join(self.cache_dir, f"{cache_key}.json")

    def _is_cache_valid(self, cache_data: Dict[str, Any], max_age_days: int) -> bool:
        """Check if the cache is still valid based on its age."""
        if 'timestamp' not in cache_data:
            return False

        cache_time = datetime.fromisoformat(cache_data['timestamp'])
        max_age = timedelta(days=max_age_days)
        return datetime.now() - cache_time < max_age

    def get_cached_rows(self, spec: SweepSpec, max_age_days: int = CACHE_MAX_AGE_DAYS) -> Optional[List[SweepRow]]:
        """Get cached sweep rows if they exist and are valid."""
        cache_path = self._get_cache_path(self._generate_cache_key(spec))

        if not os.path.exists(cache_path):
            return None

        try:
            with open(cache_path, 'r', encoding='utf-8') as f:
                cache_data = json.load(f)

            if not self._is_cache_valid(cache_data, max_age_days):
                return None

            rows = [row_from_dict(item) for item in cache_data['rows']]
            logger.info(f"Loaded {len(rows)} sweep rows from cache {cache_path}")
            return rows

        except (OSError, ValueError, KeyError) as e:
            logger.warning(f"Ignoring unreadable cache entry {cache_path}: {e}")
            return None

    def cache_rows(self, spec: SweepSpec, rows: List[SweepRow]) -> None:
        """Cache sweep rows."""
        cache_path = self._get_cache_path(self._generate_cache_key(spec))

        cache_data = {
            'timestamp': datetime.now().isoformat(),
            'spec': spec.cache_payload(),
            'rows': [row_to_dict(row) for row in rows],
        }

        try:
            with open(cache_path, 'w', encoding='utf-8') as f:
                json.dump(cache_data, f)
        except OSError as e:
            logger.warning(f"Could not write cache entry {cache_path}: {e}")

    def clear_cache(self) -> None:
        """Clear all cached sweeps."""
        for filename in os.listdir(self.cache_dir):
            if filename.endswith(".json"):
                os.remove(os.path.join(self.cache_dir, filename))
