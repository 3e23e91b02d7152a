"""
モデル成果物 リポジトリ（各テキスト形式の読み書き）
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple

from loguru import logger

from ...exceptions import DataError, ValidationError
from ...models.alignment import AlignmentMatrix, Ibm2Distortion, LexicalTable
from ...models.decoding import WEIGHT_NAMES, FeatureWeights
from ...models.lm import ArpaLanguageModel
from ...models.phrase import PhraseScores, PhraseTable
from ...models.preprocess import TruecaseModel
from ...models.tuning import TuneReport, format_weights
from .corpus_repository import CorpusRepository

PHRASE_SEPARATOR = " ||| "

# フレーズ中の "&" と "|" は実体参照で書く
PHRASE_ESCAPES = (("&", "&amp;"), ("|", "&#124;"))


def escape_phrase(tokens: Tuple[str, ...]) -> str:
    text = " ".join(tokens)
    for raw, escaped in PHRASE_ESCAPES:
        text = text.replace(raw, escaped)
    return text


def unescape_phrase(text: str) -> Tuple[str, ...]:
    for raw, escaped in reversed(PHRASE_ESCAPES):
        text = text.replace(escaped, raw)
    return tuple(text.split(" "))


def _arpa_number(value: float) -> str:
    return f"{value:.6f}"


class ModelRepository:
    """モデル成果物リポジトリ"""

    def __init__(self, text_repository: CorpusRepository = None):
        self.text = text_repository or CorpusRepository()

    def _lines(self, path: Path) -> List[str]:
        text = self.text.read_text(path)
        if not text:
            return []
        lines = text.split("\n")
        return lines[:-1] if text.endswith("\n") else lines

    # ------------------------------------------------------------------
    # トゥルーケーシング: surface<TAB>count（語ごと、最頻表記が先頭）
    # ------------------------------------------------------------------

    @staticmethod
    def format_truecase(model: TruecaseModel) -> str:
        groups: Dict[str, List[str]] = {}
        for surface in model.counts:
            groups.setdefault(surface.lower(), []).append(surface)

        lines = []
        for key in sorted(model.best_form):
            best = model.best_form[key]
            others = sorted(
                (s for s in groups.get(key, []) if s != best),
                key=lambda s: (-model.counts[s], s),
            )
            for surface in [best, *others]:
                lines.append(f"{surface}\t{model.counts[surface]}")
        return "".join(line + "\n" for line in lines)

    def save_truecase(self, path: Path, model: TruecaseModel):
        self.text.write_text(path, self.format_truecase(model))

    def load_truecase(self, path: Path) -> TruecaseModel:
        model = TruecaseModel()
        for line_no, line in enumerate(self._lines(path), start=1):
            try:
                surface, count = line.split("\t")
                model.counts[surface] = int(count)
            except ValueError:
                raise DataError(f"{path}:{line_no}: expected 'surface<TAB>count'")
            model.best_form.setdefault(surface.lower(), surface)
        return model

    # ------------------------------------------------------------------
    # 言語モデル: ARPA形式
    # ------------------------------------------------------------------

    @staticmethod
    def format_arpa(model: ArpaLanguageModel) -> str:
        counts = model.ngram_counts()
        lines = ["\\data\\"]
        lines.extend(f"ngram {n}={counts[n]}" for n in range(1, model.order + 1))
        for n in range(1, model.order + 1):
            lines.append("")
            lines.append(f"\\{n}-grams:")
            for ngram in sorted(g for g in model.entries if len(g) == n):
                logprob, backoff = model.entries[ngram]
                line = f"{_arpa_number(logprob)}\t{' '.join(ngram)}"
                if backoff is not None:
                    line += f"\t{_arpa_number(backoff)}"
                lines.append(line)
        lines.append("")
        lines.append("\\end\\")
        return "\n".join(lines) + "\n"

    def save_arpa(self, path: Path, model: ArpaLanguageModel):
        self.text.write_text(path, self.format_arpa(model))

    def load_arpa(self, path: Path) -> ArpaLanguageModel:
        declared: Dict[int, int] = {}
        entries = {}
        section: Optional[int] = None
        for line_no, line in enumerate(self._lines(path), start=1):
            if not line or line == "\\data\\":
                continue
            if line == "\\end\\":
                break
            if line.startswith("ngram "):
                n, count = line[len("ngram "):].split("=")
                declared[int(n)] = int(count)
                continue
            if line.startswith("\\") and line.endswith("-grams:"):
                section = int(line[1:-len("-grams:")])
                continue
            fields = line.split("\t")
            if section is None or len(fields) not in (2, 3):
                raise DataError(f"{path}:{line_no}: malformed ARPA line")
            ngram = tuple(fields[1].split(" "))
            if len(ngram) != section:
                raise DataError(f"{path}:{line_no}: {len(ngram)}-gram in the {section}-gram section")
            try:
                entries[ngram] = (float(fields[0]), float(fields[2]) if len(fields) == 3 else None)
            except ValueError:
                raise DataError(f"{path}:{line_no}: non-numeric ARPA value")

        if not declared:
            raise DataError(f"{path}: missing ARPA header")
        model = ArpaLanguageModel(order=max(declared), entries=entries)
        if model.ngram_counts() != declared:
            raise DataError(f"{path}: n-gram counts do not match the ARPA header")
        logger.info(f"Loaded {model.order}-gram ARPA LM from {path}")
        return model

    # ------------------------------------------------------------------
    # 語彙翻訳表: source<TAB>target<TAB>prob
    # ------------------------------------------------------------------

    @staticmethod
    def format_lexical(table: LexicalTable) -> str:
        return "".join(f"{s}\t{t}\t{p!r}\n" for (s, t), p in sorted(table.t.items()))

    def save_lexical(self, path: Path, table: LexicalTable):
        self.text.write_text(path, self.format_lexical(table))

    def load_lexical(self, path: Path) -> LexicalTable:
        t = {}
        for line_no, line in enumerate(self._lines(path), start=1):
            try:
                source, target, prob = line.split("\t")
                t[(source, target)] = float(prob)
            except ValueError:
                raise DataError(f"{path}:{line_no}: expected 'source<TAB>target<TAB>prob'")
        return LexicalTable(t=t)

    # ------------------------------------------------------------------
    # IBM2位置歪み表: i<TAB>j<TAB>l<TAB>m<TAB>prob（NULLは i = -1）
    # ------------------------------------------------------------------

    @staticmethod
    def format_distortion(distortion: Ibm2Distortion) -> str:
        return "".join(
            f"{i}\t{j}\t{l}\t{m}\t{p!r}\n" for (i, j, l, m), p in sorted(distortion.a.items())
        )

    def save_distortion(self, path: Path, distortion: Ibm2Distortion):
        self.text.write_text(path, self.format_distortion(distortion))

    def load_distortion(self, path: Path) -> Ibm2Distortion:
        a = {}
        for line_no, line in enumerate(self._lines(path), start=1):
            try:
                i, j, l, m, prob = line.split("\t")
                a[(int(i), int(j), int(l), int(m))] = float(prob)
            except ValueError:
                raise DataError(f"{path}:{line_no}: expected 'i<TAB>j<TAB>l<TAB>m<TAB>prob'")
        return Ibm2Distortion(a=a)

    # ------------------------------------------------------------------
    # アライメント: Pharaoh形式
    # ------------------------------------------------------------------

    @staticmethod
    def format_alignments(alignments: List[AlignmentMatrix]) -> str:
        return "".join(
            " ".join(f"{i}-{j}" for i, j in alignment.sorted_links()) + "\n" for alignment in alignments
        )

    def save_alignments(self, path: Path, alignments: List[AlignmentMatrix]):
        self.text.write_text(path, self.format_alignments(alignments))

    def load_alignments(self, path: Path, lengths: List[Tuple[int, int]]) -> List[AlignmentMatrix]:
        """文長 (原言語, 目的言語) のリストと組み合わせて読み込む"""
        lines = self._lines(path)
        if len(lines) != len(lengths):
            raise DataError(f"{path}: {len(lines)} alignment lines for {len(lengths)} sentence pairs")
        alignments = []
        for line_no, (line, (src_len, tgt_len)) in enumerate(zip(lines, lengths), start=1):
            try:
                links = [tuple(int(x) for x in link.split("-")) for link in line.split()]
                alignments.append(AlignmentMatrix.of(links, src_len, tgt_len))
            except (ValueError, ValidationError) as e:
                raise DataError(f"{path}:{line_no}: bad alignment line ({e})")
        return alignments

    # ------------------------------------------------------------------
    # フレーズテーブル: src ||| tgt ||| 4 scores
    # ------------------------------------------------------------------

    @staticmethod
    def format_phrase_table(table: PhraseTable) -> str:
        lines = []
        for src, tgt, scores in table.iter_sorted():
            values = " ".join(f"{value:.6g}" for value in scores.as_tuple())
            lines.append(PHRASE_SEPARATOR.join((escape_phrase(src), escape_phrase(tgt), values)))
        return "".join(line + "\n" for line in lines)

    def save_phrase_table(self, path: Path, table: PhraseTable):
        self.text.write_text(path, self.format_phrase_table(table))
        logger.info(f"Wrote {len(table)} phrase-table entries to {path}")

    def load_phrase_table(self, path: Path) -> PhraseTable:
        entries: Dict[Tuple[str, ...], list] = {}
        for line_no, line in enumerate(self._lines(path), start=1):
            fields = line.split(PHRASE_SEPARATOR)
            try:
                src, tgt, values = fields
                scores = PhraseScores(*(float(v) for v in values.split(" ")))
            except (ValueError, TypeError):
                raise DataError(f"{path}:{line_no}: malformed phrase-table line")
            entries.setdefault(unescape_phrase(src), []).append((unescape_phrase(tgt), scores))
        logger.info(f"Loaded {sum(len(v) for v in entries.values())} phrase-table entries from {path}")
        return PhraseTable(entries=entries)

    # ------------------------------------------------------------------
    # 重み・チューニングレポート
    # ------------------------------------------------------------------

    def save_weights(self, path: Path, weights: FeatureWeights):
        self.text.write_text(path, format_weights(weights))

    def load_weights(self, path: Path) -> FeatureWeights:
        values = {}
        for line_no, line in enumerate(self._lines(path), start=1):
            try:
                name, value = line.split("\t")
                values[name] = float(value)
            except ValueError:
                raise DataError(f"{path}:{line_no}: expected 'name<TAB>value'")
        missing = [name for name in WEIGHT_NAMES if name not in values]
        if missing:
            raise DataError(f"{path}: missing weights {missing}")
        try:
            return FeatureWeights.from_dict(values)
        except ValidationError as e:
            raise DataError(f"{path}: {e}")

    def save_tune_report(self, path: Path, report: TuneReport):
        self.text.write_text(path, report.to_text())
