"""
Streamlit Results Viewer for the DriftSurf Benchmark

Browse the output directories written by run_benchmark.py: the summary
table, the per-step median misclassification curves with drift times
marked, and the transition log of each algorithm.

Usage:
    streamlit run src/ui/app.py
"""

import streamlit as st
import sys
import os
from pathlib import Path

import pandas as pd

# Add project root to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(__file__))))

from config.hyperparameters import DATASETS
from config.settings import create_runtime_settings
from src.evaluation.records import read_transitions


# =============================================================================
# Page Configuration & Custom Styling
# =============================================================================

st.set_page_config(
    page_title="DriftSurf Benchmark",
    page_icon="🌊",
    layout="wide",
    initial_sidebar_state="expanded"
)

st.markdown("""
<style>
    .main .block-container {
        padding-top: 2rem;
        max-width: 1200px;
    }

    .main-header {
        background: linear-gradient(135deg, #1e3a5f 0%, #2d5a87 100%);
        padding: 1.5rem 2rem;
        border-radius: 16px;
        margin-bottom: 1.5rem;
    }

    .main-header h1 {
        color: white;
        font-size: 2rem;
        margin: 0;
    }

    .main-header p {
        color: rgba(255, 255, 255, 0.85);
        margin: 0.5rem 0 0 0;
    }
</style>
""", unsafe_allow_html=True)


# =============================================================================
# Session State Initialization
# =============================================================================

def init_session_state():
    """Initialize all session state variables."""
    defaults = {
        'results_root': create_runtime_settings().output_dir,
        'selected_run': None,
        'error_message': None
    }

    for key, default_value in defaults.items():
        if key not in st.session_state:
            st.session_state[key] = default_value


# =============================================================================
# Data Loading
# =============================================================================

def find_runs(root: str) -> list:
    """Directories under root (root included) holding a records.csv."""
    base = Path(root)
    if not base.exists():
        return []
    return sorted(str(p.parent) for p in base.rglob("records.csv"))


@st.cache_data
def load_run(run_dir: str):
    """Load one run's tables; transitions may be missing."""
    run = Path(run_dir)
    results = pd.read_csv(run / "records.csv")
    summary = pd.read_csv(run / "summary.csv")
    series = pd.read_csv(run / "timeseries.csv")
    log_path = run / "transitions.log"
    transitions = pd.DataFrame(read_transitions(log_path)) if log_path.exists() else pd.DataFrame()
    return results, summary, series, transitions


# =============================================================================
# Rendering
# =============================================================================

def render_header():
    st.markdown("""
    <div class="main-header">
        <h1>DriftSurf Benchmark</h1>
        <p>Streaming learning under concept drift</p>
    </div>
    """, unsafe_allow_html=True)


def render_summary(summary: pd.DataFrame):
    st.subheader("Median time-averaged misclassification")
    st.dataframe(summary, use_container_width=True, hide_index=True)

    best = summary.sort_values("mean_misclass_median").groupby("dataset").head(1)
    cols = st.columns(max(len(best), 1))
    for col, (_, row) in zip(cols, best.iterrows()):
        col.metric(f"Best on {row['dataset']}", row["algorithm"], f"{row['mean_misclass_median']:.4f}",
                   delta_color="off")


def render_timeseries(series: pd.DataFrame):
    st.subheader("Misclassification per time step")
    for dataset, frame in series.groupby("dataset"):
        chart = frame.pivot(index="time_step", columns="algorithm", values="misclassification")
        st.markdown(f"**{dataset}**")
        st.line_chart(chart)
        profile = DATASETS.get(dataset)
        if profile is not None and profile.drift_times:
            st.caption(f"Drift times: {', '.join(str(t) for t in profile.drift_times)}")


def render_transitions(transitions: pd.DataFrame):
    st.subheader("Transitions")
    if transitions.empty:
        st.info("No transitions recorded")
        return

    algorithms = sorted(transitions["algorithm"].unique())
    chosen = st.multiselect("Algorithms", algorithms, default=algorithms)
    trials = sorted(transitions["trial"].unique())
    trial = st.selectbox("Trial", trials)
    view = transitions[transitions["algorithm"].isin(chosen) & (transitions["trial"] == trial)]
    st.dataframe(
        view[["time_step", "algorithm", "from_state", "to_state", "trigger", "model_id"]],
        use_container_width=True,
        hide_index=True
    )

    counts = view.groupby(["algorithm", "trigger"]).size().unstack(fill_value=0)
    st.bar_chart(counts)


def render_sidebar(runs: list):
    with st.sidebar:
        st.markdown("### Results")
        root = st.text_input("Results directory", st.session_state.results_root)
        if root != st.session_state.results_root:
            st.session_state.results_root = root
            st.session_state.selected_run = None
            st.rerun()

        if runs:
            st.session_state.selected_run = st.selectbox(
                "Run",
                runs,
                index=runs.index(st.session_state.selected_run) if st.session_state.selected_run in runs else 0
            )
        else:
            st.warning("🟡 No runs found")

        st.markdown("---")

        if st.button("🔄 Refresh", use_container_width=True):
            st.cache_data.clear()
            st.rerun()

        if st.button("📦 Quick SEA run", use_container_width=True):
            with st.spinner("Running..."):
                from src.evaluation.harness import ExperimentConfig, run_experiment
                from src.evaluation.records import write_outputs
                config = ExperimentConfig(dataset="sea0", trials=1, batch_size=200)
                result = run_experiment(config)
                write_outputs(result.records, result.transitions,
                              str(Path(st.session_state.results_root) / "quick_sea0"))
                st.cache_data.clear()
                st.rerun()


# =============================================================================
# Main Application
# =============================================================================

def main():
    """Main application entry point."""
    init_session_state()
    render_header()

    runs = find_runs(st.session_state.results_root)
    render_sidebar(runs)

    if st.session_state.error_message:
        st.error(st.session_state.error_message)

    if not st.session_state.selected_run:
        st.info("Run `python run_benchmark.py run --dataset sea0` and refresh.")
        return

    try:
        results, summary, series, transitions = load_run(st.session_state.selected_run)
    except (FileNotFoundError, pd.errors.ParserError) as e:
        st.error(f"Could not load run: {e}")
        return

    tab_summary, tab_series, tab_transitions = st.tabs(["Summary", "Time series", "Transitions"])
    with tab_summary:
        render_summary(summary)
        st.caption(f"{results['trial'].nunique()} trials, {results['time_step'].nunique()} time steps")
    with tab_series:
        render_timeseries(series)
    with tab_transitions:
        render_transitions(transitions)


if __name__ == "__main__":
    main()
