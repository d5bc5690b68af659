from typing import Any


class ResultTable:
    def __init__(self,
                 columns: list[str],
                 rows: list[list[Any]] | None = None,
                 summary: dict | None = None,
                 passed: bool = True
                 ) -> None:
        self.columns = columns
        self.rows = rows or []
        self.summary = summary or {}
        self.passed = passed

    def add_row(self, *values: Any) -> None:
        if len(values) != len(self.columns):
            raise ValueError(f'Expected {len(self.columns)} values, got {len(values)}')

        self.rows.append(list(values))

    @property
    def records(self) -> list[dict]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def column(self, name: str) -> list[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def __len__(self) -> int:
        return len(self.rows)
