"""rkld-wf source package"""
