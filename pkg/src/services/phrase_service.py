"""
フレーズ抽出・フレーズテーブル構築 サービス
"""

import math
from collections import defaultdict
from typing import Dict, List, Sequence, Set, Tuple

from loguru import logger

from ..exceptions import ValidationError
from ..models.alignment import NULL, AlignmentMatrix, LexicalTable
from ..models.phrase import (
    LEX_FLOOR,
    ExtractedPhrase,
    Phrase,
    PhrasePair,
    PhraseScores,
    PhraseTable,
)


class PhraseService:
    """フレーズサービス"""

    @staticmethod
    def extract_phrases(
        src: Sequence[str],
        tgt: Sequence[str],
        alignment: AlignmentMatrix,
        max_len: int = 7,
        unaligned_expansion: bool = True,
    ) -> Set[ExtractedPhrase]:
        """アライメントと整合するフレーズ対をすべて抽出"""
        if (alignment.src_len, alignment.tgt_len) != (len(src), len(tgt)):
            raise ValidationError(
                f"alignment is {alignment.src_len}x{alignment.tgt_len} "
                f"but the sentence pair has {len(src)}x{len(tgt)} tokens"
            )

        links_by_src: Dict[int, List[int]] = defaultdict(list)
        links_by_tgt: Dict[int, List[int]] = defaultdict(list)
        for i, j in alignment.links:
            links_by_src[i].append(j)
            links_by_tgt[j].append(i)

        phrases: Set[ExtractedPhrase] = set()
        for i1 in range(len(src)):
            for i2 in range(i1, min(len(src), i1 + max_len)):
                linked = [j for i in range(i1, i2 + 1) for j in links_by_src.get(i, ())]
                if not linked:
                    continue
                j1, j2 = min(linked), max(linked)
                if j2 - j1 + 1 > max_len:
                    continue
                # 目的言語スパン内の語が外側の原言語語と対応していないこと
                if any(
                    not i1 <= i <= i2
                    for j in range(j1, j2 + 1)
                    for i in links_by_tgt.get(j, ())
                ):
                    continue

                starts = [j1]
                ends = [j2]
                if unaligned_expansion:
                    while starts[-1] > 0 and starts[-1] - 1 not in links_by_tgt:
                        starts.append(starts[-1] - 1)
                    while ends[-1] < len(tgt) - 1 and ends[-1] + 1 not in links_by_tgt:
                        ends.append(ends[-1] + 1)

                for start in starts:
                    for end in ends:
                        if end - start + 1 > max_len:
                            continue
                        phrases.add(ExtractedPhrase(
                            pair=PhrasePair(src=tuple(src[i1:i2 + 1]), tgt=tuple(tgt[start:end + 1])),
                            src_span=(i1, i2),
                            tgt_span=(start, end),
                        ))
        return phrases

    @staticmethod
    def lexical_weight(
        src: Sequence[str],
        tgt: Sequence[str],
        links: Set[Tuple[int, int]],
        table: LexicalTable,
    ) -> float:
        """フレーズ内リンクによる語彙重み Π_j (1/|a_j|) Σ_i w(t_j|s_i)、未対応語は NULL"""
        weight = 1.0
        for j, f in enumerate(tgt):
            linked = sorted(i for i, jj in links if jj == j)
            if linked:
                weight *= math.fsum(table.prob(src[i], f) for i in linked) / len(linked)
            else:
                weight *= table.prob(NULL, f)
        return weight

    def build_phrase_table(
        self,
        pairs: Sequence[Tuple[Sequence[str], Sequence[str]]],
        alignments: Sequence[AlignmentMatrix],
        lexical_fwd: LexicalTable,
        lexical_rev: LexicalTable,
        max_len: int = 7,
        unaligned_expansion: bool = True,
    ) -> PhraseTable:
        """コーパス全体の抽出結果を数えて4素性を計算"""
        if len(pairs) != len(alignments):
            raise ValidationError(f"{len(pairs)} sentence pairs but {len(alignments)} alignments")

        pair_counts: Dict[Tuple[Phrase, Phrase], int] = defaultdict(int)
        lex_ts: Dict[Tuple[Phrase, Phrase], float] = {}
        lex_st: Dict[Tuple[Phrase, Phrase], float] = {}

        for (src, tgt), alignment in zip(pairs, alignments):
            for phrase in self.extract_phrases(src, tgt, alignment, max_len, unaligned_expansion):
                key = (phrase.pair.src, phrase.pair.tgt)
                pair_counts[key] += 1

                (i1, i2), (j1, j2) = phrase.src_span, phrase.tgt_span
                inside = {
                    (i - i1, j - j1)
                    for i, j in alignment.links
                    if i1 <= i <= i2 and j1 <= j <= j2
                }
                forward = self.lexical_weight(phrase.pair.src, phrase.pair.tgt, inside, lexical_fwd)
                backward = self.lexical_weight(
                    phrase.pair.tgt, phrase.pair.src, {(j, i) for i, j in inside}, lexical_rev
                )
                # 複数の出現では最大の語彙重みを採用
                lex_ts[key] = max(lex_ts.get(key, 0.0), forward)
                lex_st[key] = max(lex_st.get(key, 0.0), backward)

        src_counts: Dict[Phrase, int] = defaultdict(int)
        tgt_counts: Dict[Phrase, int] = defaultdict(int)
        for (s, t), count in pair_counts.items():
            src_counts[s] += count
            tgt_counts[t] += count

        entries: Dict[Phrase, List[Tuple[Phrase, PhraseScores]]] = defaultdict(list)
        for (s, t) in sorted(pair_counts):
            count = pair_counts[(s, t)]
            entries[s].append((t, PhraseScores(
                phi_t_given_s=count / src_counts[s],
                phi_s_given_t=count / tgt_counts[t],
                lex_t_given_s=max(lex_ts[(s, t)], LEX_FLOOR),
                lex_s_given_t=max(lex_st[(s, t)], LEX_FLOOR),
            )))

        table = PhraseTable(entries=dict(entries))
        logger.info(
            f"Built phrase table from {len(pairs)} sentence pairs: "
            f"{len(table)} entries, {len(table.entries)} source phrases"
        )
        return table
