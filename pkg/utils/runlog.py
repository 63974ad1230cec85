"""
Training Logs
One JSON object per line: epoch (or step), losses, wall time
"""

import json
import logging
import time
from pathlib import Path

logger = logging.getLogger(__name__)


class TrainingLog:
    """Collects records in memory and appends them to a JSONL file when a path is given"""

    def __init__(self, path=None, resume: bool = False):
        self.path = Path(path) if path is not None else None
        self.records = []
        self._start = time.monotonic()
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            if resume and self.path.is_file():
                self.records = [json.loads(line) for line in self.path.read_text().splitlines() if line.strip()]
            else:
                self.path.write_text('')

    def write(self, **record) -> dict:
        record.setdefault('wall_time', round(time.monotonic() - self._start, 3))
        self.records.append(record)
        if self.path is not None:
            with self.path.open('a') as handle:
                handle.write(json.dumps(record, sort_keys=True) + '\n')
        return record

    def truncate(self, key: str, limit: int):
        """Drop records whose `key` exceeds limit (log lines written after the checkpoint we resume from)"""
        self.records = [r for r in self.records if r.get(key, 0) <= limit]
        if self.path is not None:
            self.path.write_text(''.join(json.dumps(r, sort_keys=True) + '\n' for r in self.records))

    def last(self, key: str):
        for record in reversed(self.records):
            if key in record:
                return record[key]
        return None
