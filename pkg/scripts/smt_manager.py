#!/usr/bin/env python3
"""
英語・インド諸語 SMTツールキット 統合管理コマンド
"""

import sys
import argparse
from pathlib import Path
from datetime import datetime

# プロジェクトルートを sys.path に追加
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from loguru import logger

from src.config.pipeline_config import UNLIMITED_DISTORTION, PipelineConfig
from src.config.settings import setup_logging
from src.exceptions import SmtError, ValidationError
from src.services.corpus_service import OGIVE_THRESHOLDS
from src.services.evaluation_service import EvaluationService
from src.services.pipeline_service import PipelineService


def distortion_limit_arg(value: str):
    """整数、または none・unlimited・-1（無制限）"""
    if value.strip().lower() in UNLIMITED_DISTORTION:
        return "none"
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'none', got {value!r}")


# CLIフラグ → 設定キー（フラグ名の '-' を '_' に置き換えたもの）
CONFIG_FLAGS = {
    "--src-lang": dict(type=str, help="原言語タグ（例: hi, en）"),
    "--tgt-lang": dict(type=str, help="目的言語タグ"),
    "--corpus-prefix": dict(type=str, help="学習コーパスの接頭辞（<prefix>.<lang>）"),
    "--dev-prefix": dict(type=str, help="開発セットの接頭辞"),
    "--test-prefix": dict(type=str, help="テストセットの接頭辞"),
    "--model-dir": dict(type=str, help="モデルディレクトリ"),
    "--profile-file": dict(type=str, help="言語プロファイルのJSONファイル"),
    "--flores-dir": dict(type=str, help="Flores-200 のルートディレクトリ"),
    "--max-len": dict(type=int, help="最大トークン数（デフォルト: 80）"),
    "--max-ratio": dict(type=float, help="最大長比（デフォルト: 9.0）"),
    "--lm-order": dict(type=int, help="言語モデルの次数（デフォルト: 3）"),
    "--lm-smoothing": dict(choices=["none", "witten-bell"], help="言語モデルの平滑化"),
    "--em-iterations": dict(type=int, help="IBM1/IBM2 のEM反復回数（デフォルト: 5）"),
    "--symmetrization": dict(
        choices=["intersection", "union", "grow-diag", "grow-diag-final", "grow-diag-final-and"],
        help="対称化ヒューリスティック",
    ),
    "--max-phrase-len": dict(type=int, help="最大フレーズ長（デフォルト: 7）"),
    "--stack-size": dict(type=int, help="スタックサイズ（デフォルト: 100）"),
    "--distortion-limit": dict(type=distortion_limit_arg, help="歪み制限（デフォルト: 6、none または -1 で無制限）"),
    "--oov-log-score": dict(type=float, help="未知語の対数スコア（デフォルト: -10）"),
    "--ribes-alpha": dict(type=float, help="RIBES α（デフォルト: 0.25）"),
    "--ribes-beta": dict(type=float, help="RIBES β（デフォルト: 0.10）"),
    "--tune-metric": dict(choices=["bleu", "ribes", "meteor"], help="チューニング指標"),
    "--tune-passes": dict(type=int, help="チューニングの周回数（デフォルト: 3）"),
}


class SmtArgumentParser(argparse.ArgumentParser):
    """使い方の誤りを終了コード1で報告するパーサ"""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"❌ 引数エラー: {message}", file=sys.stderr)
        sys.exit(ValidationError.exit_code)


def add_config_arguments(parser):
    """設定ファイルと設定上書きフラグ"""
    parser.add_argument("--config", type=str, help="JSON設定ファイル")
    for flag, options in CONFIG_FLAGS.items():
        parser.add_argument(flag, default=None, **options)
    parser.add_argument(
        "--no-unaligned-expansion", dest="unaligned_expansion", action="store_const", const=False,
        default=None, help="未対応語によるフレーズ拡張を行わない",
    )
    parser.add_argument("--verbose", action="store_true", help="DEBUGログを表示")


def setup_argument_parser():
    """コマンドライン引数の設定"""
    parser = SmtArgumentParser(
        description="英語・インド諸語 SMTツールキット 統合管理コマンド",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
使用例:
  python smt_manager.py show-config --config hi-en.json        # 解決済みの設定を表示
  python smt_manager.py stats --config hi-en.json               # コーパスの長さ分布
  python smt_manager.py clean --config hi-en.json               # クリーニング済みコーパスを書き出し
  python smt_manager.py train --config hi-en.json               # 学習（LM・アライメント・フレーズテーブル）
  python smt_manager.py tune --config hi-en.json --dev-prefix data/dev    # 重みチューニング
  python smt_manager.py translate --config hi-en.json input.hi output.en  # 翻訳
  python smt_manager.py translate --config hi-en.json input.hi output.en --trace  # 導出も出力
  python smt_manager.py evaluate --config hi-en.json output.en ref.en --per-sentence --stats  # 評価
        """
    )

    subparsers = parser.add_subparsers(dest="command", help="実行するコマンド", parser_class=SmtArgumentParser)

    # クリーニングコマンド
    clean_parser = subparsers.add_parser("clean", help="コーパスをクリーニング・フィルタ・トークン化")
    clean_parser.add_argument("--output-prefix", type=str, help="出力の接頭辞（デフォルト: <corpus_prefix>.clean）")

    # 統計コマンド
    subparsers.add_parser("stats", help="トークン長ヒストグラムと累積割合を表示")

    # 学習コマンド
    subparsers.add_parser("train", help="翻訳モデルを学習")

    # チューニングコマンド
    subparsers.add_parser("tune", help="開発セットで重みを調整")

    # 翻訳コマンド
    translate_parser = subparsers.add_parser("translate", help="1行1文のファイルを翻訳")
    translate_parser.add_argument("input", nargs="?", help="入力ファイル（省略時は test_prefix の原言語側）")
    translate_parser.add_argument("output", help="出力ファイル")
    translate_parser.add_argument("--trace", action="store_true", help="導出を <output>.trace に書き出す")

    # 評価コマンド
    evaluate_parser = subparsers.add_parser("evaluate", help="BLEU・RIBES・METEORで評価")
    evaluate_parser.add_argument("hyp", help="翻訳結果ファイル")
    evaluate_parser.add_argument("ref", nargs="?", help="参照訳ファイル（省略時は test_prefix の目的言語側）")
    evaluate_parser.add_argument("--per-sentence", action="store_true", help="文ごとのスコアも表示")
    evaluate_parser.add_argument("--stats", action="store_true", help="参照訳の長さの累積割合も表示")
    evaluate_parser.add_argument("--csv", type=str, help="pair,direction,BLEU,RIBES,METEOR 行を追記するCSV")

    # 設定表示コマンド
    subparsers.add_parser("show-config", help="解決済みの設定をJSONで表示")

    for subparser in subparsers.choices.values():
        add_config_arguments(subparser)

    return parser


def load_config(args) -> PipelineConfig:
    """設定ファイルを読み込み、指定されたフラグで上書き"""
    overrides = {flag[2:].replace("-", "_"): getattr(args, flag[2:].replace("-", "_")) for flag in CONFIG_FLAGS}
    overrides["unaligned_expansion"] = args.unaligned_expansion
    return PipelineConfig.load(Path(args.config) if args.config else None, overrides)


def clean_corpus(args, config):
    """コーパスのクリーニング"""
    print("🔄 コーパスをクリーニング中...")
    src_path, tgt_path = PipelineService(config).clean(args.output_prefix)
    print("✅ クリーニング完了")
    print(f"   原言語: {src_path}")
    print(f"   目的言語: {tgt_path}")


def show_stats(args, config):
    """コーパス統計の表示"""
    print("🔄 コーパス統計を計算中...")
    histogram, ogive = PipelineService(config).stats()
    print("📊 トークン長ヒストグラム:")
    print(histogram.to_string(index=False))
    print("\n📊 累積割合（しきい値未満の文の割合）:")
    print(ogive.to_string(index=False, float_format=lambda v: f"{v:.4f}"))


def train_model(args, config):
    """翻訳モデルの学習"""
    print(f"🔄 学習を開始... ({config.src_lang} → {config.tgt_lang})")
    model_dir = PipelineService(config).train()
    print(f"✅ 学習完了: {model_dir}")


def tune_weights(args, config):
    """重みチューニング"""
    print(f"🔄 重みチューニングを開始... (指標: {config.tune_metric}, 周回: {config.tune_passes})")
    report = PipelineService(config).tune()
    print("✅ チューニング完了")
    print(f"   初期スコア: {report.initial_score:.6f}")
    print(f"   採用スコア: {report.accepted_score:.6f}")
    for name, value in report.accepted.as_dict().items():
        print(f"   {name}: {value:.6f}")


def translate_file(args, config):
    """ファイルの翻訳"""
    service = PipelineService(config)
    input_path = Path(args.input) if args.input else service.test_side(0)
    print(f"🔄 翻訳中: {input_path}")
    output = service.translate(input_path, Path(args.output), trace=args.trace)
    print(f"✅ 翻訳完了: {output}")


def evaluate_file(args, config):
    """翻訳結果の評価"""
    service = PipelineService(config)
    ref_path = Path(args.ref) if args.ref else service.test_side(1)
    result = service.evaluate(Path(args.hyp), ref_path, per_sentence=args.per_sentence)

    print("📊 評価結果:")
    print(EvaluationService.report_frame(result).to_string(index=False))
    print(f"{result.bleu.score * 100:.2f}  {result.ribes:.2f}  {result.meteor:.2f}")

    if args.per_sentence:
        print("\n📊 文ごとのスコア:")
        print(EvaluationService.sentence_frame(result).to_string(index=False))

    if args.stats:
        print("\n📊 参照訳の累積割合:")
        ogive = service.reference_ogive(ref_path, OGIVE_THRESHOLDS)
        print(ogive.to_string(index=False, float_format=lambda v: f"{v:.4f}"))

    if args.csv:
        csv_path = EvaluationService.append_csv(result, Path(args.csv))
        print(f"✅ CSVに追記: {csv_path}")


def show_config(args, config):
    """設定の表示"""
    print(config.to_json())


def main(argv=None) -> int:
    """メイン処理（終了コードを返す）"""
    parser = setup_argument_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return ValidationError.exit_code

    setup_logging("DEBUG" if args.verbose else None)

    command_functions = {
        "clean": clean_corpus,
        "stats": show_stats,
        "train": train_model,
        "tune": tune_weights,
        "translate": translate_file,
        "evaluate": evaluate_file,
        "show-config": show_config,
    }

    if args.command != "show-config":
        print(f"=== SMTツールキット - {args.command} ===")
        print(f"実行時刻: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")

    try:
        config = load_config(args)
        command_functions[args.command](args, config)
    except SmtError as e:
        stage = e.stage or args.command
        logger.error(f"{args.command} failed at stage {stage}: {e}")
        print(f"❌ {args.command} 失敗 [stage: {stage}]: {e}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.exception(f"{args.command} failed with an internal error")
        print(f"❌ {args.command} 内部エラー: {e}", file=sys.stderr)
        return SmtError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
