"""
Train/test split protocols over clip manifests (game-level and clip-level).
"""

import logging
import re
from typing import List, Optional, Sequence, Union

from .models import Assignment, SplitEntry, SplitManifest

logger = logging.getLogger(__name__)

TENNIS_TRAIN_GAMES = ["game5", "game10", "game6", "game2", "game7", "game3", "game8"]
TENNIS_TEST_GAMES = ["game1", "game9", "game4"]

DEFAULT_TRAIN_FRACTION = 0.70


def natural_key(text: str) -> list:
    """Sort key treating digit runs as integers (game2 < game10)."""
    return [int(part) if part.isdigit() else part for part in re.split(r"(\d+)", text)]


def _entries(manifest: Union[SplitManifest, Sequence[SplitEntry]]) -> List[SplitEntry]:
    return list(manifest.entries if isinstance(manifest, SplitManifest) else manifest)


def _warn_if_degenerate(result: SplitManifest, protocol: str) -> None:
    if not result.clips(Assignment.TEST):
        logger.warning(f"{protocol} split produced an empty test set")
    if not result.clips(Assignment.TRAIN):
        logger.warning(f"{protocol} split produced an empty training set")


def split_game_level(
    manifest: Union[SplitManifest, Sequence[SplitEntry]],
    train_games: Sequence[str] = TENNIS_TRAIN_GAMES,
    test_games: Optional[Sequence[str]] = TENNIS_TEST_GAMES,
) -> SplitManifest:
    """
    Assign whole games to train or test.

    Args:
        manifest: Clips to split
        train_games: Games that go to training
        test_games: Games that go to testing; when None every game not in
            `train_games` is a test game

    Returns:
        New manifest with every entry assigned

    Raises:
        ValueError: A protocol game is absent from the manifest, a game is in
            both lists, or a manifest game is in neither list
    """
    entries = _entries(manifest)
    games = {e.game_id for e in entries}
    protocol = list(train_games) + list(test_games or [])
    unknown = [g for g in protocol if g not in games]
    if unknown:
        raise ValueError(f"Unknown game id(s) in protocol: {unknown}")
    overlap = set(train_games) & set(test_games or [])
    if overlap:
        raise ValueError(f"Games listed for both train and test: {sorted(overlap)}")
    if test_games is not None:
        unassigned = sorted(games - set(protocol), key=natural_key)
        if unassigned:
            raise ValueError(f"Games not covered by the protocol: {unassigned}")

    train = set(train_games)
    result = SplitManifest(
        entries=[
            e.model_copy(update={"assignment": Assignment.TRAIN if e.game_id in train else Assignment.TEST})
            for e in entries
        ]
    )
    _warn_if_degenerate(result, "Game-level")
    logger.info(f"Game-level split: train fraction {100 * result.train_fraction:.2f}%")
    return result


def split_clip_level(
    manifest: Union[SplitManifest, Sequence[SplitEntry]],
    train_fraction: float = DEFAULT_TRAIN_FRACTION,
) -> SplitManifest:
    """
    Greedy cumulative-frame split at clip granularity.

    Clips are visited by (game id, clip id) in natural order. A clip goes to
    training while the frames already assigned to training are below
    `train_fraction` of the total; every later clip goes to test.

    Raises:
        ValueError: Empty manifest or a fraction outside (0, 1]
    """
    entries = _entries(manifest)
    if not entries:
        raise ValueError("Cannot split an empty manifest")
    if not 0.0 < train_fraction <= 1.0:
        raise ValueError(f"train_fraction must be in (0, 1], got {train_fraction}")

    ordered = sorted(entries, key=lambda e: (natural_key(e.game_id), natural_key(e.clip_id)))
    target = train_fraction * sum(e.frame_count for e in ordered)
    cumulative = 0
    assigned = []
    for entry in ordered:
        if cumulative < target:
            assigned.append(entry.model_copy(update={"assignment": Assignment.TRAIN}))
            cumulative += entry.frame_count
        else:
            assigned.append(entry.model_copy(update={"assignment": Assignment.TEST}))

    result = SplitManifest(entries=assigned)
    _warn_if_degenerate(result, "Clip-level")
    logger.info(
        f"Clip-level split: {len(result.clips(Assignment.TRAIN))} train / "
        f"{len(result.clips(Assignment.TEST))} test clips, "
        f"train fraction {100 * result.train_fraction:.2f}%"
    )
    return result
