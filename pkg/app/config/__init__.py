# Config module 