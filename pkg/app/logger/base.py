"""Logger interface.

Implementations accept a message plus arbitrary keyword fields, which end up
as structured key/value pairs in the emitted record.
"""

from abc import ABC, abstractmethod
from typing import Any


class Logger(ABC):
    """Interface every gofr-credal logger implements."""

    @abstractmethod
    def get_session_id(self) -> str:
        """Identifier shared by every record of this process."""

    @abstractmethod
    def debug(self, message: str, **kwargs: Any) -> None: ...

    @abstractmethod
    def info(self, message: str, **kwargs: Any) -> None: ...

    @abstractmethod
    def warning(self, message: str, **kwargs: Any) -> None: ...

    @abstractmethod
    def error(self, message: str, **kwargs: Any) -> None: ...

    @abstractmethod
    def critical(self, message: str, **kwargs: Any) -> None: ...
