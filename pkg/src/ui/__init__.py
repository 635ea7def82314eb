# Streamlit results viewer
