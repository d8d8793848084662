"""Per-round transfer accounting for parameter uploads."""

from __future__ import annotations

from dataclasses import dataclass

FP32_BYTES = 4
HALF_BYTES = 2


@dataclass(frozen=True)
class TransferSize:
    parameters: int
    bytes_fp32: int
    bytes_half: int

    @property
    def megabytes_fp32(self) -> float:
        return self.bytes_fp32 / 1e6

    @property
    def megabytes_half(self) -> float:
        return self.bytes_half / 1e6


def transfer_size(n_parameters: int) -> TransferSize:
    return TransferSize(
        parameters=n_parameters,
        bytes_fp32=FP32_BYTES * n_parameters,
        bytes_half=HALF_BYTES * n_parameters,
    )


@dataclass
class CommunicationLedger:
    rounds: int = 0
    bytes_fp32: int = 0
    bytes_half: int = 0

    def record_round(self, size: TransferSize, n_clients: int) -> None:
        self.rounds += 1
        self.bytes_fp32 += size.bytes_fp32 * n_clients
        self.bytes_half += size.bytes_half * n_clients

    def as_dict(self) -> dict:
        return {"rounds": self.rounds, "bytes_fp32": self.bytes_fp32, "bytes_half": self.bytes_half}
