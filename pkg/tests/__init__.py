"""rkld-wf test suite"""
