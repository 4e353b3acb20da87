"""Simulated pulsed broadcast medium.

Agents communicate only by broadcasting short pulses. Every pulse
occupies the channel for `airtime` seconds; two pulses whose airtime
intervals overlap interfere and are both marked collided. Under the
default drop_all policy collided pulses are lost for everyone; the
deliver_all policy ignores interference and exists only to run
no-interference ablations.

There is no propagation delay and no range limit: every agent alive at
the delivery instant hears every surviving pulse except its own. Agents
joining mid-run hear only pulses delivered strictly after their join
time; leaving agents stop transmitting and receiving instantly.

The medium is owned by the simulation engine and advanced on a single
logical timeline, so delivery order (delivery_time, then sender id) is
globally consistent and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COLLISION_POLICIES = ("drop_all", "deliver_all")


@dataclass(frozen=True)
class PulseMessage:
    """The only datum agents ever exchange.

    The broadcast-staggering phase is private to each agent and is not
    part of the payload; `hidden` stays None except in the explicit
    payload-ablation mode of the drone engine.
    """

    sender: int
    pos: np.ndarray
    theta: float
    sent_at: float
    hidden: float | None = None


@dataclass
class _InFlight:
    msg: PulseMessage
    delivery_time: float
    collided: bool = False


@dataclass
class Delivery:
    recipients: tuple[int, ...]
    msg: PulseMessage


@dataclass
class MediumStats:
    sent: int = 0
    delivered: int = 0
    dropped: int = 0
    collisions: int = 0  # messages ever marked collided


@dataclass
class BroadcastMedium:
    """Single-channel broadcast with interval-overlap interference."""

    airtime: float = 0.005
    collision_policy: str = "drop_all"
    _queue: list[_InFlight] = field(default_factory=list)
    _joined: dict[int, float] = field(default_factory=dict)
    _left: dict[int, float] = field(default_factory=dict)
    _last_poll: float = 0.0
    stats: MediumStats = field(default_factory=MediumStats)

    def __post_init__(self) -> None:
        if self.airtime < 0.0:
            raise ValueError(f"airtime must be >= 0, got {self.airtime}")
        if self.collision_policy not in COLLISION_POLICIES:
            raise ValueError(
                f"unknown collision policy {self.collision_policy!r} "
                f"(expected one of {COLLISION_POLICIES})"
            )

    # -- membership ----------------------------------------------------

    def join(self, agent_id: int, when: float) -> None:
        self._joined[agent_id] = when
        self._left.pop(agent_id, None)

    def leave(self, agent_id: int, when: float) -> None:
        if agent_id in self._joined:
            self._left[agent_id] = when

    def _alive_at(self, t: float) -> list[int]:
        out = []
        for aid, joined in self._joined.items():
            if joined < t and (aid not in self._left or t < self._left[aid]):
                out.append(aid)
        return sorted(out)

    # -- traffic -------------------------------------------------------

    def broadcast(self, msg: PulseMessage) -> None:
        """Enqueue a pulse; mark interference with anything in flight.

        Two pulses interfere when their airtime intervals overlap with
        positive measure, or start at exactly the same instant (the only
        way to collide when airtime is zero).
        """
        if msg.sent_at < self._last_poll:
            raise ValueError(
                f"broadcast at t={msg.sent_at} is before the last poll "
                f"at t={self._last_poll}"
            )
        entry = _InFlight(msg, msg.sent_at + self.airtime)
        s1, e1 = msg.sent_at, entry.delivery_time
        for other in self._queue:
            s2, e2 = other.msg.sent_at, other.delivery_time
            if max(s1, s2) < min(e1, e2) or s1 == s2:
                if not entry.collided:
                    entry.collided = True
                    self.stats.collisions += 1
                if not other.collided:
                    other.collided = True
                    self.stats.collisions += 1
        self._queue.append(entry)
        self.stats.sent += 1

    def poll_deliveries(self, now: float) -> list[Delivery]:
        """Drain every pulse due by `now`, in delivery order.

        Collided pulses are dropped (and counted) under drop_all, or
        passed through under deliver_all. Recipients are the agents
        alive at the delivery instant, minus the sender.
        """
        if now < self._last_poll:
            raise ValueError(f"poll at t={now} is before t={self._last_poll}")
        self._last_poll = now
        due = [e for e in self._queue if e.delivery_time <= now]
        self._queue = [e for e in self._queue if e.delivery_time > now]
        due.sort(key=lambda e: (e.delivery_time, e.msg.sender))
        out: list[Delivery] = []
        for entry in due:
            if entry.collided and self.collision_policy == "drop_all":
                self.stats.dropped += 1
                continue
            recipients = tuple(
                aid
                for aid in self._alive_at(entry.delivery_time)
                if aid != entry.msg.sender
            )
            self.stats.delivered += 1
            out.append(Delivery(recipients, entry.msg))
        return out

    # -- accounting ----------------------------------------------------

    def collision_count(self) -> int:
        """Messages ever marked collided since construction."""
        return self.stats.collisions

    def in_flight(self) -> int:
        return len(self._queue)
